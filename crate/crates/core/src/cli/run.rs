//! The three commands, independent of argument parsing.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{RunConfig, Suite};
use super::report::{InstanceInfo, LevelEntry, Mode, PointError, ProfileInfo, Report};
use crate::construct::chain::chain_check_with;
use crate::construct::profile::{integrate_profile, profile_to_instance, Profile};
use crate::construct::quadrature::quadrature_convergence;
use crate::curvature::{
    contracted_bianchi_residual, max_single_trace, ricci_identity_residual,
    riemann_symmetry_residual,
};
use crate::error::{Error, Result};
use crate::jets::{FieldSpec, Point};
use crate::levelset::{level_points, level_set_report_at, weyl_restricted_at, LevelSpreads};
use crate::soliton::{
    contracted_identity_reports, d_norm_report, d_tensor_at, d_weyl_report, evaluate_point_to,
    soliton_report, PointEval, ResidualReport, SolitonInstance,
};

/// Seeded points of the instance's sample box, in a fixed order.
pub fn sample_points(inst: &SolitonInstance, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Point::new(inst.sample_box.sample(&mut rng)).expect("sample box has positive dimension")
        })
        .collect()
}

/// Checks, skips and errors gathered over a sweep.
#[derive(Default)]
struct Tally {
    checks: Vec<ResidualReport>,
    skipped: usize,
    errors: Vec<PointError>,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.checks.extend(other.checks);
        self.skipped += other.skipped;
        self.errors.extend(other.errors);
    }

    /// Record a failed evaluation: critical points are counted, anything else
    /// is kept as an error.
    fn fail(&mut self, p: &Point, e: Error) {
        match e {
            Error::CriticalPoint { .. } => self.skipped += 1,
            e => self.errors.push(PointError {
                point: p.coords().to_vec(),
                message: e.to_string(),
            }),
        }
    }
}

/// `tol · max(1, scale)`, for comparisons whose size depends on the data.
fn relative(name: &str, value: f64, scale: f64, tol: f64, p: &Point) -> ResidualReport {
    ResidualReport::scalar(name, value, tol * scale.max(1.0), p)
}

fn algebraic_checks(pe: &PointEval, tol: f64, t: &mut Tally) {
    let cp = &pe.cp;
    let p = &pe.point;
    let rm = cp.riemann.max_abs();
    t.checks.push(relative(
        "riemann_symmetries",
        riemann_symmetry_residual(&cp.riemann),
        rm,
        tol,
        p,
    ));
    t.checks.push(relative(
        "contracted_bianchi",
        contracted_bianchi_residual(cp),
        cp.grad_ricci.max_abs(),
        tol,
        p,
    ));
    let grad = pe.f.grad.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    t.checks.push(relative(
        "ricci_identity",
        ricci_identity_residual(&pe.f, cp),
        (rm * grad).max(pe.f.third.max_abs()),
        tol,
        p,
    ));
    t.checks.push(relative(
        "weyl_trace_free",
        max_single_trace(&cp.weyl, &cp.inverse),
        rm,
        tol,
        p,
    ));
    if pe.dim() == 3 {
        t.checks.push(relative(
            "weyl_vanishes_dim3",
            cp.weyl.max_abs(),
            rm,
            tol,
            p,
        ));
    }
    let d = d_tensor_at(pe);
    let dmax = d.d.max_abs() * cp.inverse.max_abs() * pe.dim() as f64;
    t.checks.push(relative(
        "d_antisymmetry",
        d.antisymmetry(),
        d.d.max_abs(),
        tol,
        p,
    ));
    let (t1, t2) = d.traces(&cp.inverse);
    t.checks
        .push(relative("d_traces", t1.max(t2), dmax, tol, p));
    match d_norm_report(pe, tol) {
        Ok(r) => t.checks.push(r),
        Err(e) => t.fail(p, e),
    }
}

fn soliton_checks(pe: &PointEval, tol: f64, t: &mut Tally) {
    t.checks.push(soliton_report(pe, tol));
    t.checks.extend(contracted_identity_reports(pe, tol));
    t.checks.push(d_weyl_report(pe, tol));
}

/// Evaluate and check one point; the f-jet is taken to third order when the
/// algebraic suite needs it.
fn point_tally(inst: &SolitonInstance, p: &Point, suites: &[Suite], cfg: &RunConfig) -> Tally {
    let mut t = Tally::default();
    let f_order = if suites.contains(&Suite::Algebraic) {
        3
    } else {
        2
    };
    let pe = match evaluate_point_to(inst, p, f_order) {
        Ok(pe) => pe,
        Err(e) => {
            t.fail(p, e);
            return t;
        }
    };
    if suites.contains(&Suite::Algebraic) {
        algebraic_checks(&pe, cfg.tolerances.algebraic, &mut t);
    }
    if suites.contains(&Suite::Soliton) {
        soliton_checks(&pe, cfg.tolerances.soliton, &mut t);
    }
    t
}

/// Level surfaces through the first `levels` sample points. Returns the
/// per-level data and, in `t`, the level checks (and, in four dimensions, the
/// restricted Weyl check at every level point).
fn level_sweep(
    inst: &SolitonInstance,
    cfg: &RunConfig,
    with_soliton: bool,
    t: &mut Tally,
) -> Vec<LevelEntry> {
    let lc = &cfg.levelset;
    let anchors = sample_points(inst, lc.levels, cfg.sampling.seed);
    let tol = cfg.tolerances.levelset;
    let outcomes: Vec<(Option<LevelEntry>, Tally)> = anchors
        .par_iter()
        .enumerate()
        .map(|(i, anchor)| {
            let mut lt = Tally::default();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampling.seed.wrapping_add(1 + i as u64));
            let pts = match level_points(inst, anchor, lc.per_level.max(1), &mut rng) {
                Ok(p) => p,
                Err(e) => {
                    lt.fail(anchor, e);
                    return (None, lt);
                }
            };
            let mut reports = Vec::new();
            let mut value = f64::NAN;
            for p in &pts {
                let pe = match evaluate_point_to(inst, p, 2) {
                    Ok(pe) => pe,
                    Err(e) => {
                        lt.fail(p, e);
                        continue;
                    }
                };
                if p == anchor {
                    value = pe.f.value;
                }
                if with_soliton {
                    lt.checks.push(soliton_report(&pe, cfg.tolerances.soliton));
                }
                if inst.dim() == 4 {
                    match weyl_restricted_at(&pe, tol) {
                        Ok(r) => lt.checks.push(r),
                        Err(e) => lt.fail(p, e),
                    }
                }
                match level_set_report_at(&pe) {
                    Ok(r) => reports.push(r),
                    Err(e) => lt.fail(p, e),
                }
            }
            if reports.is_empty() {
                return (None, lt);
            }
            let spreads = LevelSpreads::from_reports(&reports);
            lt.checks.extend(spreads.reports(tol, anchor));
            let entry = LevelEntry {
                value,
                anchor: anchor.coords().to_vec(),
                spreads,
                points: reports,
            };
            (Some(entry), lt)
        })
        .collect();
    let mut entries = Vec::new();
    for (e, lt) in outcomes {
        t.absorb(lt);
        entries.extend(e);
    }
    entries
}

fn quadrature_checks(inst: &SolitonInstance, cfg: &RunConfig, t: &mut Tally) -> Result<()> {
    let n = inst.dim();
    let qc = &cfg.quadrature;
    let f = FieldSpec::scalar_expr(n, &qc.f)?;
    let u = FieldSpec::scalar_expr(n, &qc.u)?;
    let v = FieldSpec::scalar_expr(n, &qc.v)?;
    let res = qc.resolutions.clone().unwrap_or_else(|| {
        if n == 3 {
            vec![12, 24, 48]
        } else {
            vec![6, 12]
        }
    });
    if res.is_empty() {
        return Err(Error::InvalidParameter(
            "quadrature.resolutions is empty".into(),
        ));
    }
    let conv = quadrature_convergence(n, &f, &u, &v, inst.params.m, &res)?;
    let last = conv.levels.last().expect("at least one resolution");
    let tol = cfg.tolerances.quadrature;
    let mk = |name: &str, value: f64, tolerance: f64| ResidualReport {
        name: name.into(),
        value,
        frobenius: value,
        tolerance,
        pass: value <= tolerance,
        point: vec![],
    };
    t.checks
        .push(mk("quadrature_self_adjoint", last.self_adjoint, tol));
    t.checks.push(mk("quadrature_by_parts", last.by_parts, tol));
    t.checks.push(mk("quadrature_total_l", last.total_l, tol));
    // worst ratio of the observed error to a fourth-order reduction; errors
    // already at round-off level are not held to the rate
    let deficit = conv
        .levels
        .windows(2)
        .flat_map(|w| {
            [
                (w[0].self_adjoint, w[1].self_adjoint),
                (w[0].by_parts, w[1].by_parts),
                (w[0].total_l, w[1].total_l),
            ]
        })
        .map(|(a, b)| {
            if b <= QUADRATURE_FLOOR {
                0.0
            } else {
                16.0 * b / a
            }
        })
        .fold(0.0, f64::max);
    t.checks.push(mk("quadrature_fourth_order", deficit, 1.0));
    Ok(())
}

/// Errors below this are treated as converged in the rate check.
pub const QUADRATURE_FLOOR: f64 = 1e-12;

fn finish(report: &mut Report, start: Instant, phases: Vec<(&str, f64)>) {
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    for (k, v) in phases {
        report.timings.phases_ms.insert(k.to_string(), v);
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn run_verify(inst: &SolitonInstance, suites: &[Suite], cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut phases = Vec::new();
    let mut t = Tally::default();
    let pointwise: Vec<Suite> = suites
        .iter()
        .copied()
        .filter(|s| matches!(s, Suite::Algebraic | Suite::Soliton))
        .collect();
    if !pointwise.is_empty() {
        let t0 = Instant::now();
        let pts = sample_points(inst, cfg.sampling.count, cfg.sampling.seed);
        let tallies: Vec<Tally> = pts
            .par_iter()
            .map(|p| point_tally(inst, p, &pointwise, cfg))
            .collect();
        tallies.into_iter().for_each(|x| t.absorb(x));
        phases.push(("points", ms_since(t0)));
    }
    let mut levels = None;
    if suites.contains(&Suite::Levelset) {
        let t0 = Instant::now();
        levels = Some(level_sweep(inst, cfg, false, &mut t));
        phases.push(("levelset", ms_since(t0)));
    }
    if suites.contains(&Suite::Quadrature) {
        let t0 = Instant::now();
        quadrature_checks(inst, cfg, &mut t)?;
        phases.push(("quadrature", ms_since(t0)));
    }
    let mut report = Report::new(
        "verify",
        InstanceInfo::of(inst),
        Mode::Verify,
        t.checks,
        t.skipped,
        t.errors,
    );
    report.levels = levels;
    finish(&mut report, start, phases);
    Ok(report)
}

/// Level-surface sweep. When the soliton equation holds at every level point
/// the structure checks are claimed; otherwise the run is informational.
pub fn run_levelset(inst: &SolitonInstance, cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut t = Tally::default();
    let entries = level_sweep(inst, cfg, true, &mut t);
    let is_soliton = t
        .checks
        .iter()
        .filter(|c| c.name == "soliton_equation")
        .all(|c| c.pass)
        && !entries.is_empty();
    let (mode, checks) = if is_soliton {
        (Mode::Verify, t.checks)
    } else {
        (Mode::Informational, Vec::new())
    };
    let mut report = Report::new(
        "levelset",
        InstanceInfo::of(inst),
        mode,
        checks,
        t.skipped,
        t.errors,
    );
    report.levels = Some(entries);
    finish(&mut report, start, vec![]);
    Ok(report)
}

/// Integrate, optionally export, and check the profile through the coordinate
/// engine. Parameter errors are returned; per-point errors are recorded.
pub fn run_construct(cfg: &RunConfig) -> Result<(Report, Profile)> {
    let start = Instant::now();
    let c = &cfg.construct;
    let pr = integrate_profile(c.n, c.m, c.rho, c.q, c.r_max, c.h_r)?;
    let t0 = Instant::now();
    if let Some(path) = &c.csv {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        pr.write_csv(std::io::BufWriter::new(file))?;
    }
    let mut phases = vec![("integrate", ms_since(t0))];
    let mut t = Tally::default();
    let tol = cfg.tolerances.soliton;
    let lo = pr.r_lo();
    let (worst_k, worst) = (0..pr.len())
        .filter(|&k| pr.grid[k] >= lo)
        .map(|k| (k, pr.node_residual(k)))
        .fold((0, 0.0f64), |acc, x| if !(x.1 <= acc.1) { x } else { acc });
    let node_point = Point::new(crate::construct::chain::radial_point(c.n, pr.grid[worst_k]))?;
    t.checks.push(ResidualReport::scalar(
        "profile_node_residual",
        worst,
        tol,
        &node_point,
    ));
    let t0 = Instant::now();
    let inst = match profile_to_instance(&pr) {
        Ok(inst) => {
            let pts = sample_points(&inst, cfg.sampling.count, cfg.sampling.seed);
            let tallies: Vec<Tally> = pts
                .par_iter()
                .map(|p| {
                    let mut pt = Tally::default();
                    match evaluate_point_to(&inst, p, 2) {
                        Ok(pe) => pt.checks.push(soliton_report(&pe, tol)),
                        Err(e) => pt.fail(p, e),
                    }
                    pt
                })
                .collect();
            tallies.into_iter().for_each(|x| t.absorb(x));
            Some(inst)
        }
        Err(e) => {
            t.fail(&node_point, e);
            None
        }
    };
    phases.push(("round_trip", ms_since(t0)));
    match chain_check_with(&pr, cfg.tolerances.chain) {
        Ok(ch) => t.checks.push(ch.report),
        Err(e) => t.fail(&node_point, e),
    }
    let info = match &inst {
        Some(i) => InstanceInfo::of(i),
        None => InstanceInfo {
            name: format!("WARP{}", c.n),
            dim: c.n,
            m: c.m,
            rho: c.rho,
            metric: "profile".into(),
            potential: "profile".into(),
        },
    };
    let mut report = Report::new(
        "construct",
        info,
        Mode::Verify,
        t.checks,
        t.skipped,
        t.errors,
    );
    report.profile = Some(ProfileInfo {
        params: pr.params,
        status: pr.status,
        nodes: pr.len(),
        r_end: pr.r_end(),
        min_sectional_curvature: pr.min_sectional_curvature(),
        chain_coefficient: crate::construct::chain::chain_coefficient(c.n),
        csv: c.csv.as_ref().map(|p| p.display().to_string()),
    });
    finish(&mut report, start, phases);
    Ok((report, pr))
}

/// Largest CSV inconsistency accepted by `levelset --from-profile`.
pub const PROFILE_CONSISTENCY_TOLERANCE: f64 = 1e-6;

/// Read a profile CSV and check that the supplied `(n, m, ρ)` reproduce its
/// stored curvature column.
pub fn load_profile(
    path: &std::path::Path,
    n: usize,
    m: crate::soliton::MParam,
    rho: f64,
) -> Result<Profile> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("dimension {n} < 3")));
    }
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let pr = Profile::read_csv(std::io::BufReader::new(file), n, m, rho)?;
    let defect = pr.consistency_defect();
    if !(defect <= PROFILE_CONSISTENCY_TOLERANCE) {
        return Err(Error::InvalidParameter(format!(
            "profile {} is inconsistent with n = {n}, m = {m}, rho = {rho} (defect {defect:e})",
            path.display()
        )));
    }
    Ok(pr)
}
