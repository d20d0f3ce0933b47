//! The four subcommands. Each returns a [`Report`] and an exit status; the
//! report always ends with `status=` and `exit=` lines.

use std::path::Path;

use eigenbundle::chern::ChernVector;
use eigenbundle::equivalence::{diag_obstruction, theta as theta_invariant, verdict, ThetaInvariant};
use eigenbundle::matrixfield::validate;
use eigenbundle::relations::{cp_forced_diagonalizable, enumerate_admissible_n2, star_check, CpVerdict};
use eigenbundle::spectral::{order_on_basis, BasisSpectra};
use eigenbundle::{Domain, SphereGrid};

use crate::config::{assemble_default, construct_family, ConstructKind, ConstructSpec, ConstructSpecError, Overrides, Scenario, ScenarioConfig};
use crate::error::{CliError, ExitCode};
use crate::fieldfile::FieldFile;
use crate::report::{join, Report};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: Report,
    pub code: ExitCode,
}

fn finish(mut report: Report, result: Result<(), CliError>) -> Outcome {
    let code = match &result {
        Ok(()) => ExitCode::Ok,
        Err(e) => e.exit_code(),
    };
    let message = result.err().map(|e| e.to_string());
    report.finish(code, message.as_deref());
    Outcome { report, code }
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, CliError> {
    ScenarioConfig::load(path)?.resolve(path, overrides)
}

fn describe(r: &mut Report, prefix: &str, s: &Scenario) {
    r.push(format!("{prefix}field"), s.field.label());
    r.push(format!("{prefix}source"), &s.source);
    r.push(format!("{prefix}dim"), s.field.dim());
    describe_domain(r, prefix, &s.domain);
}

fn describe_domain(r: &mut Report, prefix: &str, d: &Domain) {
    let grid: &SphereGrid = match d {
        Domain::Sphere(g) => {
            r.push(format!("{prefix}domain"), "sphere");
            g
        }
        Domain::Product(p) => {
            r.push(format!("{prefix}domain"), "product");
            r.push(format!("{prefix}basepoint_first"), p.basepoint_first);
            r.push(format!("{prefix}basepoint_second"), p.basepoint_second);
            &p.first
        }
    };
    r.push(format!("{prefix}n_theta"), grid.n_theta());
    r.push(format!("{prefix}n_phi"), grid.n_phi());
    r.push(format!("{prefix}nodes_per_cycle"), grid.node_count());
}

fn describe_cycles(r: &mut Report, s: &Scenario) {
    r.push("cycles", s.basis.len());
    for (i, c) in s.basis.cycles().iter().enumerate() {
        r.push(format!("cycle{}", i + 1), &c.label);
    }
}

/// Validation and spectral ordering of one scenario.
fn spectra(r: &mut Report, prefix: &str, s: &Scenario) -> Result<BasisSpectra, CliError> {
    let v = validate(&s.field, &s.basis, s.tolerances.normal, s.tolerances.gap)?;
    r.push_float(format!("{prefix}normality_residual"), v.normality.residual);
    r.push(format!("{prefix}normal"), v.normality.passed);
    r.push_float(format!("{prefix}min_gap"), v.gap.min_gap);
    r.push(format!("{prefix}multiplicity_free"), v.gap.multiplicity_free);
    r.push(format!("{prefix}validation"), if v.passed() { "pass" } else { "fail" });
    if !v.passed() {
        return Err(CliError::Validation(format!(
            "{}field is not normal and multiplicity-free within tolerances (residual {}, min gap {})",
            prefix,
            crate::report::float(v.normality.residual),
            crate::report::float(v.gap.min_gap)
        )));
    }
    let sp = order_on_basis(&s.field, &s.basis)?;
    for (i, sd) in sp.cycles.iter().enumerate() {
        let c = i + 1;
        r.push_float(format!("{prefix}cycle{c}_certificate_ratio"), sd.certificate.max_ratio);
        r.push_float(format!("{prefix}cycle{c}_projector_defect"), sd.projector_defect());
        r.push_float(format!("{prefix}cycle{c}_reconstruction_residual"), sd.reconstruction_residual());
    }
    Ok(sp)
}

fn push_pairings(r: &mut Report, prefix: &str, bands: &[ChernVector]) {
    for v in bands {
        for (c, (k, res)) in v.pairings.iter().zip(&v.residuals).enumerate() {
            r.push(format!("{prefix}band{}_cycle{}", v.band + 1, c + 1), k);
            r.push_float(format!("{prefix}band{}_cycle{}_residual", v.band + 1, c + 1), *res);
        }
    }
}

fn push_band_sums(r: &mut Report, prefix: &str, inv: &ThetaInvariant) {
    for (c, s) in inv.band_sums().iter().enumerate() {
        r.push(format!("{prefix}band_sum_cycle{}", c + 1), s);
    }
}

fn one_based(w: &[usize]) -> String {
    join(&w.iter().map(|b| b + 1).collect::<Vec<_>>())
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => report.write_to(p),
        None => Ok(()),
    }
}

/// Validation → spectral ordering → diagonalizability obstruction → verdict.
pub fn analyze(config: &Path, overrides: &Overrides, out: Option<&Path>) -> Outcome {
    let mut r = Report::new("analyze");
    let mut report_path = out.map(Path::to_path_buf);
    let result = (|| {
        let s = load(config, overrides)?;
        report_path = report_path.clone().or_else(|| s.report.clone());
        describe(&mut r, "", &s);
        describe_cycles(&mut r, &s);
        r.push_float("tol_normal", s.tolerances.normal);
        r.push_float("tol_gap", s.tolerances.gap);
        let sp = spectra(&mut r, "", &s)?;
        let obstruction = diag_obstruction(&sp)?;
        push_pairings(&mut r, "", &obstruction.bands);
        push_band_sums(&mut r, "", &obstruction);
        let v = verdict(&obstruction)?;
        r.push("diagonalizable", v.holds);
        if !v.holds {
            r.push("witness_bands", one_based(&v.witness));
        }
        Ok(())
    })();
    let outcome = finish(r, result);
    write_report(outcome, report_path.as_deref())
}

fn write_report(mut outcome: Outcome, path: Option<&Path>) -> Outcome {
    if let Err(e) = emit(&outcome.report, path) {
        let mut r = outcome.report.clone();
        r.push("report_error", e.to_string());
        outcome = Outcome { report: r, code: outcome.code };
    }
    outcome
}

/// `θ(A, B)` and the unitary-equivalence verdict.
pub fn theta(config_a: &Path, config_b: &Path, overrides: &Overrides, out: Option<&Path>) -> Outcome {
    let mut r = Report::new("theta");
    let result = (|| {
        let sa = load(config_a, overrides)?;
        let sb = load(config_b, overrides)?;
        describe(&mut r, "a_", &sa);
        describe(&mut r, "b_", &sb);
        if sa.domain != sb.domain {
            return Err(CliError::Validation("theta undefined: the two fields live on different domains".into()));
        }
        describe_cycles(&mut r, &sa);
        r.push_float("tol_normal", sa.tolerances.normal);
        r.push_float("tol_gap", sa.tolerances.gap);
        let spa = spectra(&mut r, "a_", &sa)?;
        let spb = spectra(&mut r, "b_", &sb)?;
        let t = theta_invariant(&spa, &spb)?;
        for v in &t.bands {
            r.push(format!("theta_band{}", v.band + 1), join(&v.pairings));
            r.push_float(format!("theta_band{}_residual", v.band + 1), v.max_residual());
        }
        push_pairings(&mut r, "theta_", &t.bands);
        push_band_sums(&mut r, "theta_", &t);
        let v = verdict(&t)?;
        r.push("equivalent", v.holds);
        if !v.holds {
            r.push("witness_bands", one_based(&v.witness));
        }
        Ok(())
    })();
    let outcome = finish(r, result);
    write_report(outcome, out)
}

/// Parse `construct` parameters: `bloch k=<k>` (or `<k>`), `clutching
/// c=<c₁,…,cₙ>` (or `<c₁,…,cₙ>`).
pub fn parse_construct(kind: &str, params: &str) -> Result<ConstructSpec, CliError> {
    let bad = |m: String| CliError::Argument(m);
    let list = |s: &str| -> Result<Vec<i64>, CliError> {
        s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| bad(format!("not an integer: '{t}'")))).collect()
    };
    match kind {
        "bloch" => {
            let v = params.strip_prefix("k=").unwrap_or(params);
            let k = v.trim().parse().map_err(|_| bad(format!("bloch needs an integer degree, got '{params}'")))?;
            Ok(ConstructSpec { kind: ConstructKind::Bloch, k: Some(k), tuple: None })
        }
        "clutching" => {
            let v = params.strip_prefix("c=").unwrap_or(params);
            Ok(ConstructSpec { kind: ConstructKind::Clutching, k: None, tuple: Some(list(v)?) })
        }
        other => Err(bad(format!("unknown construction '{other}' (expected bloch or clutching)"))),
    }
}

/// Build the family, assemble it with the default profile `j + i·j·z` and
/// write it as a field file sampled on `grid`.
pub fn construct(kind: &str, params: &str, grid: (usize, usize), out: &Path) -> Outcome {
    let mut r = Report::new("construct");
    let result = (|| {
        let spec = parse_construct(kind, params)?;
        r.push("kind", kind);
        if let Some(t) = &spec.tuple {
            r.push("tuple", join(t));
            r.push("tuple_sum", t.iter().sum::<i64>());
        }
        if let Some(k) = spec.k {
            r.push("k", k);
        }
        let (family, desc) = construct_family(&spec).map_err(|e| match e {
            ConstructSpecError::Compute(e) => CliError::Compute(e),
            ConstructSpecError::Missing(k) | ConstructSpecError::Unexpected(k) => {
                CliError::Argument(format!("bad parameter '{k}'"))
            }
        })?;
        let g = SphereGrid::new(grid.0, grid.1)?;
        let field = assemble_default(&family)?;
        let file = FieldFile::sample(&field, &g)?;
        r.push("construction", desc);
        r.push("dim", file.n);
        r.push("n_theta", g.n_theta());
        r.push("n_phi", g.n_phi());
        r.push("nodes", g.node_count());
        r.push("profile", "j+i*j*z");
        file.write(out)?;
        r.push("out", out.display());
        Ok(())
    })();
    finish(r, result)
}

/// Arguments of the `relations` subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationsArgs {
    pub star: Option<[i64; 4]>,
    pub enumerate_bound: Option<u32>,
    pub cp: Option<(u32, Vec<i64>)>,
}

pub fn relations(args: &RelationsArgs) -> Outcome {
    let mut r = Report::new("relations");
    let result = (|| {
        if args.star.is_none() && args.enumerate_bound.is_none() && args.cp.is_none() {
            return Err(CliError::Argument("give at least one of --star, --enumerate-n2, --cp".into()));
        }
        if let Some([k1, k2, l1, l2]) = args.star {
            let s = star_check(k1, k2, l1, l2);
            r.push("star_args", join(&[k1, k2, l1, l2]));
            r.push("star_lhs", s.lhs);
            r.push("star", if s.holds { "holds" } else { "fails" });
        }
        if let Some(bound) = args.enumerate_bound {
            let classes = enumerate_admissible_n2(bound);
            r.push("enumerate_n2_bound", bound);
            r.push("enumerate_n2_count", classes.len());
            for (i, (k, l)) in classes.iter().enumerate() {
                r.push(format!("enumerate_n2_class{}", i + 1), format!("{k},{l}"));
            }
        }
        if let Some((m, coeffs)) = &args.cp {
            r.push("cp_m", m);
            r.push("cp_coeffs", join(coeffs));
            let v = cp_forced_diagonalizable(*m, coeffs)?;
            let (label, sum, sq) = match v {
                CpVerdict::Feasible => ("feasible", coeffs.iter().sum::<i64>(), 0),
                CpVerdict::Infeasible { sum, sum_of_squares } => ("infeasible", sum, sum_of_squares),
                CpVerdict::NotExcluded => ("not_excluded", 0, coeffs.iter().map(|k| k * k).sum()),
            };
            r.push("cp_sum", sum);
            r.push("cp_sum_of_squares", sq);
            r.push("cp", label);
        }
        Ok(())
    })();
    finish(r, result)
}
