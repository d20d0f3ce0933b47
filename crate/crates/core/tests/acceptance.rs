//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};

use common::*;
use eigenbundle::chern::{band_sums, chern_plaquette_number, chern_weil_number, curvature_density, pair_samples};
use eigenbundle::construct::{
    assemble, bloch, clutching, fixtures, maps, orthogonalize, transplant, EigenvalueProfile, ProjectorFamily,
};
use eigenbundle::equivalence::{diag_obstruction, kron_hom_projector, theta, verdict};
use eigenbundle::linalg::{self, c, CMatrix};
use eigenbundle::matrixfield::char_poly;
use eigenbundle::relations::{cp_forced_diagonalizable, enumerate_admissible_n2, star_check, symmetric_poly_check, CpVerdict, RingClass};
use eigenbundle::{MatrixField, Point, SpherePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn on_sphere(f: &MatrixField) -> impl Fn(&SpherePoint) -> eigenbundle::Result<CMatrix> + '_ {
    move |q| f.eval(&Point::Sphere(*q))
}

fn chern_number_of_example_projector() -> Outcome {
    let (grid, _) = sphere(64, 32);
    let p1 = fixtures::fixture_p1();
    let samples: Vec<CMatrix> = grid.nodes().map(|q| p1.eval(&Point::Sphere(q)).unwrap()).collect();
    let pc = chern_plaquette_number(&samples, &grid).map_err(|e| e.to_string())?;
    ensure!(pc.value == 1 && pc.residual < 1e-6, "plaquette {pc:?}");
    let (fine, _) = sphere(200, 100);
    let cw = chern_weil_number(&on_sphere(&p1), &fine).map_err(|e| e.to_string())?;
    ensure!((cw.value - 1.0).abs() <= 0.01, "Chern–Weil {cw:?}");
    Ok(format!("plaquette={} residual={:.1e} chern_weil={:.5}", pc.value, pc.residual, cw.value))
}

fn curvature_density_matches_closed_form() -> Outcome {
    let p1 = fixtures::fixture_p1();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let q = SpherePoint::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.1..PI - 0.1));
        let s = curvature_density(&on_sphere(&p1), &q, 1e-3).map_err(|e| e.to_string())?;
        let want = q.phi.sin() / (4.0 * PI);
        worst = worst.max((s.value - c(want, 0.0)).norm() / want);
    }
    ensure!(worst <= 1e-4, "worst relative error {worst:.2e}");
    Ok(format!("20 points, worst relative error {worst:.1e}"))
}

fn theta_of_example_pair() -> Outcome {
    let (_, basis) = sphere(64, 32);
    let sa = spectra(&fixtures::fixture_a(), &basis);
    let sb = spectra(&fixtures::fixture_b(), &basis);
    let t = theta(&sa, &sb).map_err(|e| e.to_string())?;
    ensure!(t.pairings() == vec![vec![-2], vec![2]], "theta {:?}", t.pairings());
    let v = verdict(&t).map_err(|e| e.to_string())?;
    ensure!(!v.holds, "verdict says equivalent");
    // Closed-form R₂ = Q₂ ⊗ P₂ᵀ has curvature density sinφ/2π.
    let (p2, q2) = (fixtures::fixture_p2(), fixtures::fixture_q2());
    let r2 = |q: &SpherePoint| {
        let pt = Point::Sphere(*q);
        Ok(kron_hom_projector(&q2.eval(&pt)?, &p2.eval(&pt)?)?.r)
    };
    for &(th, ph) in &[(0.4, 0.9), (2.0, 2.1), (5.0, 1.4)] {
        let s = curvature_density(&r2, &SpherePoint::new(th, ph), 1e-3).map_err(|e| e.to_string())?;
        let want = ph.sin() / (2.0 * PI);
        ensure!((s.value - c(want, 0.0)).norm() <= 1e-4 * want, "R2 density {:?} vs {want}", s.value);
    }
    Ok(format!("theta={:?} equivalent={} max_residual={:.1e}", t.pairings(), v.holds, max_residual(&t.bands)))
}

fn theta_against_diagonal_is_the_obstruction() -> Outcome {
    let (_, basis) = sphere(64, 32);
    let sd = spectra(&fixtures::fixture_d(), &basis);
    let mut detail = Vec::new();
    for (name, f) in [("A", fixtures::fixture_a()), ("B", fixtures::fixture_b())] {
        let s = spectra(&f, &basis);
        let t = theta(&sd, &s).map_err(|e| e.to_string())?.pairings();
        let d = diag_obstruction(&s).map_err(|e| e.to_string())?.pairings();
        ensure!(t == d, "{name}: theta(D,·)={t:?} obstruction={d:?}");
        detail.push(format!("{name}:{d:?}"));
    }
    Ok(detail.join(" "))
}

fn characteristic_polynomials() -> Outcome {
    let (grid, basis) = sphere(64, 32);
    let a = char_poly(&fixtures::fixture_a(), &basis).map_err(|e| e.to_string())?;
    let b = char_poly(&fixtures::fixture_b(), &basis).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, cp) in a.samples[0].iter().enumerate() {
        let e = grid.node(k).embed();
        let tr = c(2.0 * (e.x * e.x + e.y * e.y), 2.0 * e.z * e.z);
        let det = c(0.0, 4.0 * (e.x * e.x + e.y * e.y) * e.z * e.z);
        worst = worst.max((cp.trace() - tr).norm()).max((cp.determinant() - det).norm());
    }
    let ab = a.max_deviation(&b);
    ensure!(worst <= 1e-9 && ab <= 1e-9, "trace/det error {worst:.2e}, A vs B {ab:.2e}");
    Ok(format!("trace/det error {worst:.1e}, A vs B {ab:.1e} on {} nodes", grid.node_count()))
}

fn every_family() -> Vec<(String, ProjectorFamily, eigenbundle::CycleBasis)> {
    let (_, s2) = sphere(64, 32);
    let s2xs2 = product(32, 16);
    let mut out: Vec<(String, ProjectorFamily, _)> = vec![
        ("fixture A".into(), fixtures::family_a(), s2.clone()),
        ("fixture B".into(), fixtures::family_b(), s2.clone()),
        ("coordinate 3".into(), ProjectorFamily::coordinate(3), s2.clone()),
    ];
    for k in -3..=3 {
        out.push((format!("bloch({k})"), bloch(k), s2.clone()));
        out.push((format!("bloch(1)∘wrap({k})"), bloch(1).pullback(maps::azimuthal_wrap(k)), s2.clone()));
        out.push((format!("bloch({k})∘π₂"), bloch(k).pullback(maps::second_factor), s2xs2.clone()));
    }
    out.push(("fixture A∘π₁".into(), fixtures::family_a().pullback(maps::first_factor), s2xs2.clone()));
    for t in CLUTCHING_TUPLES {
        out.push((format!("clutching{t:?}"), clutching(t).unwrap(), s2.clone()));
    }
    // Lines of bloch(2) sheared by the constant map I + 0.4·e₁e₂*, then re-orthogonalized.
    let fam = bloch(2);
    let lines: Vec<MatrixField> = (0..2)
        .map(|i| {
            let band = fam.band(i);
            MatrixField::new(2, "sheared", move |x| {
                let mut g = linalg::identity(2);
                g[(0, 1)] = c(0.4, 0.0);
                let v = g * linalg::range_vector(&band.eval(x)?);
                let n = v.norm();
                Ok(linalg::outer(&(v / c(n, 0.0))))
            })
        })
        .collect();
    out.push(("orthogonalized shear of bloch(2)".into(), orthogonalize(&lines, &s2).unwrap(), s2.clone()));
    out
}

fn sum_rule() -> Outcome {
    let mut checked = 0;
    for (name, fam, basis) in every_family() {
        let v = fam.pairings(&basis).map_err(|e| format!("{name}: {e}"))?;
        ensure!(band_sums(&v).iter().all(|&s| s == 0), "{name}: sums {:?}", band_sums(&v));
        checked += 1;
    }
    let (_, basis) = sphere(64, 32);
    let mut fields = vec![fixtures::fixture_a(), fixtures::fixture_b(), fixtures::fixture_d()];
    for t in CLUTCHING_TUPLES {
        fields.push(assemble(&EigenvalueProfile::default_for(t.len()), &clutching(t).unwrap()).unwrap());
    }
    let sa = spectra(&fixtures::fixture_a(), &basis);
    fields.push(transplant(&sa.cycles[0], &EigenvalueProfile::constant(vec![c(1.0, 0.0), c(0.0, 2.0)])).unwrap());
    for f in &fields {
        let d = diag_obstruction(&spectra(f, &basis)).map_err(|e| e.to_string())?;
        ensure!(d.band_sums().iter().all(|&s| s == 0), "{}: sums {:?}", f.label(), d.band_sums());
        checked += 1;
    }
    Ok(format!("{checked} families and spectral decompositions, all band sums zero"))
}

fn clutching_realization() -> Outcome {
    let (_, basis) = sphere(64, 32);
    let mut sigma = None;
    let mut worst = 0.0f64;
    for t in CLUTCHING_TUPLES {
        let v = clutching(t).and_then(|f| f.pairings(&basis)).map_err(|e| e.to_string())?;
        worst = worst.max(max_residual(&v));
        let got: Vec<i64> = v.iter().map(|x| x.pairings[0]).collect();
        let s = if got == t { 1 } else if got.iter().zip(t).all(|(g, w)| *g == -w) { -1 } else { 0 };
        ensure!(s != 0, "{t:?} gave {got:?}");
        ensure!(sigma.is_none_or(|x| x == s), "sign flips at {t:?}");
        sigma = Some(s);
    }
    ensure!(worst < 1e-6, "residual {worst:.2e}");
    Ok(format!("sigma={:+} for all 5 tuples, max residual {worst:.1e}", sigma.unwrap()))
}

fn pullback_naturality() -> Outcome {
    let basis = product(64, 32);
    let a = fixtures::fixture_a().pullback(maps::first_factor, "A∘π₁");
    let d = diag_obstruction(&spectra(&a, &basis)).map_err(|e| e.to_string())?.pairings();
    ensure!(d == vec![vec![1, 0], vec![-1, 0]], "A∘π₁ gave {d:?}");
    let mut seen = Vec::new();
    for l in -3i64..=3 {
        let (_, s2) = sphere(64, 32);
        let cl = bloch(l).pairings(&s2).map_err(|e| e.to_string())?[0].pairings[0];
        let got = pairings(&bloch(l).pullback(maps::second_factor).pairings(&basis).map_err(|e| e.to_string())?);
        ensure!(got == vec![vec![0, cl], vec![0, -cl]], "bloch({l})∘π₂ gave {got:?}, c={cl}");
        seen.push(cl);
    }
    Ok(format!("A∘π₁ {d:?}; c(ℓ) for ℓ=-3..3: {seen:?}"))
}

fn transplant_preserves_pairings() -> Outcome {
    let (_, basis) = sphere(64, 32);
    let sa = spectra(&fixtures::fixture_a(), &basis);
    let before = diag_obstruction(&sa).map_err(|e| e.to_string())?;
    for values in [vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 2.0)]] {
        let f = transplant(&sa.cycles[0], &EigenvalueProfile::constant(values.clone())).map_err(|e| e.to_string())?;
        let after = diag_obstruction(&spectra(&f, &basis)).map_err(|e| e.to_string())?;
        ensure!(after.pairings() == before.pairings(), "{values:?}: {:?} vs {:?}", after.pairings(), before.pairings());
    }
    Ok(format!("pairings {:?} for both profiles", before.pairings()))
}

fn relations_suite() -> Outcome {
    for k1 in -3..=3 {
        for k2 in -3..=3 {
            for l1 in -3..=3 {
                for l2 in -3..=3 {
                    let full = symmetric_poly_check(&[
                        RingClass::product(k1, l1),
                        RingClass::product(k2, l2),
                        RingClass::product(-k1 - k2, -l1 - l2),
                    ])
                    .map_err(|e| e.to_string())?;
                    ensure!(star_check(k1, k2, l1, l2).holds == full.s2_vanishes, "({k1},{k2},{l1},{l2})");
                }
            }
        }
    }
    let n2 = enumerate_admissible_n2(3).len();
    ensure!(n2 == 13, "enumeration gave {n2}");
    let mut cp_cases = 0;
    for n in 2..=4u32 {
        for code in 0..7usize.pow(n) {
            let t: Vec<i64> = (0..n).map(|i| (code / 7usize.pow(i) % 7) as i64 - 3).collect();
            if t.iter().sum::<i64>() != 0 || t.iter().all(|&k| k == 0) {
                continue;
            }
            let v = cp_forced_diagonalizable(2, &t).map_err(|e| e.to_string())?;
            ensure!(matches!(v, CpVerdict::Infeasible { .. }), "{t:?} gave {v:?}");
            cp_cases += 1;
        }
    }
    Ok(format!("2401 star cases agree; n=2 classes: {n2}; {cp_cases} nonzero CP² tuples infeasible"))
}

fn numerical_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut idem, mut herm, mut tr) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(2..=4);
        let (p, q) = (random_line(&mut rng, n), random_line(&mut rng, n));
        let r = kron_hom_projector(&q, &p).map_err(|e| e.to_string())?.r;
        idem = idem.max(linalg::frob(&(&r * &r - &r)));
        herm = herm.max(linalg::frob(&(&r - r.adjoint())));
        tr = tr.max((linalg::trace(&r) - c(1.0, 0.0)).norm());
    }
    ensure!(idem <= 1e-12 && herm <= 1e-12 && tr <= 1e-10, "idempotence {idem:.1e} hermiticity {herm:.1e} trace {tr:.1e}");
    let (grid, basis) = sphere(64, 32);
    let lines = [
        fixtures::fixture_p1(),
        fixtures::fixture_p2(),
        fixtures::fixture_q1(),
        fixtures::fixture_q2(),
        MatrixField::constant(linalg::bloch_projector(0.0, 0.0, 1.0), "e1"),
    ];
    let samples: Vec<Vec<CMatrix>> =
        lines.iter().map(|f| grid.nodes().map(|q| f.eval(&Point::Sphere(q)).unwrap()).collect()).collect();
    let single: Vec<i64> =
        samples.iter().map(|s| pair_samples(0, std::slice::from_ref(s), &basis).map(|v| v.pairings[0])).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for i in 0..lines.len() {
        for j in 0..lines.len() {
            let r: Vec<CMatrix> = (0..grid.node_count())
                .map(|k| kron_hom_projector(&samples[j][k], &samples[i][k]).map(|h| h.r))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let hom = pair_samples(0, &[r], &basis).map_err(|e| e.to_string())?.pairings[0];
            ensure!(hom == single[j] - single[i], "Hom({}, {}) = {hom}", lines[i].label(), lines[j].label());
        }
    }
    Ok(format!("max ‖R²−R‖={idem:.1e} ‖R−R*‖={herm:.1e} |trR−1|={tr:.1e}; Hom identity on {} pairs", lines.len().pow(2)))
}

fn integer_summary(nt: usize, np: usize) -> Vec<Vec<Vec<i64>>> {
    let (_, basis) = sphere(nt, np);
    let sa = spectra(&fixtures::fixture_a(), &basis);
    let sb = spectra(&fixtures::fixture_b(), &basis);
    let mut out = vec![
        diag_obstruction(&sa).unwrap().pairings(),
        diag_obstruction(&sb).unwrap().pairings(),
        theta(&sa, &sb).unwrap().pairings(),
    ];
    for (_, fam, _) in every_family().into_iter().filter(|(_, _, b)| b.len() == 1) {
        out.push(pairings(&fam.pairings(&basis).unwrap()));
    }
    out
}

fn stability() -> Outcome {
    let base = integer_summary(32, 16);
    for (nt, np) in [(64, 32), (128, 64)] {
        ensure!(integer_summary(nt, np) == base, "pairings differ at {nt}x{np}");
    }
    let run = || {
        let (_, basis) = sphere(32, 16);
        let s = spectra(&fixtures::fixture_b(), &basis);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 2);
        let d = diag_obstruction(&spectra(&fixtures::fixture_a().conjugated(&u), &basis)).unwrap();
        format!("{:?}{:?}{:?}", s.cycles[0].eigenvalues, s.cycles[0].projectors, d)
    };
    ensure!(run() == run(), "fixed-seed runs differ");
    Ok(format!("{} integer results identical on 32x16, 64x32, 128x64; fixed-seed runs byte-identical", base.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("Chern number of the example projector", chern_number_of_example_projector),
        ("curvature density", curvature_density_matches_closed_form),
        ("theta of the example pair", theta_of_example_pair),
        ("theta(D, A) equals the obstruction", theta_against_diagonal_is_the_obstruction),
        ("characteristic polynomial", characteristic_polynomials),
        ("band sum rule", sum_rule),
        ("clutching realization", clutching_realization),
        ("pullback naturality", pullback_naturality),
        ("spectrum transplant", transplant_preserves_pairings),
        ("relations suite", relations_suite),
        ("numerical algebra", numerical_algebra),
        ("stability", stability),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
