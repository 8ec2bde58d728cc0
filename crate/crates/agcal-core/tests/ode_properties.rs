use agcal_core::gauges::{exp_gauge, AlgebraSpec, Gauge};
use agcal_core::gen_numbers::GenNumber;
use agcal_core::index_core::Net;
use agcal_core::linalg::{expm, Matrix};
use agcal_core::ode_gen::{entry_bound, eps_grid, solve_linear, t_grid, GenMatrix, OdeProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-2.0..=2.0)).collect()).collect();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn exponential_group_law_and_corrected_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let d = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, d);
        let t = rng.gen_range(-3.0..=3.0);
        let fwd = expm(&a.scale(t)).unwrap();
        let back = expm(&a.scale(-t)).unwrap();
        let prod = fwd.mul(&back);
        let err = prod.add(&Matrix::identity(d).scale(-1.0)).max_abs();
        assert!(err <= 1e-8 * fwd.max_abs().max(1.0) * back.max_abs().max(1.0), "d = {d}, err = {err}");
        let (_, corrected) = entry_bound(&a, t);
        assert!(fwd.max_abs() <= corrected * (1.0 + 1e-9));
    }
}

#[test]
fn diagonal_system_decouples() {
    let spec = AlgebraSpec::diagonal(exp_gauge(&Gauge::special()));
    let num = |s: &str| GenNumber::parse(s, spec.clone()).unwrap();
    let a = GenMatrix::new(
        vec![vec![num("eps^-1"), num("0")], vec![num("0"), num("-2")]],
        Gauge::special(),
    )
    .unwrap();
    let c = vec![num("1"), num("3")];
    let p = OdeProblem::new(a, c, 0.0, Gauge::special(), spec, (-2.0, 2.0)).unwrap();
    let eg: Vec<f64> = eps_grid(8).into_iter().take(6).collect();
    let sol = solve_linear(&p, &eg, &t_grid(-0.5, 0.5, 7)).unwrap();
    for row in &sol.table {
        let x1 = (-row.t / row.eps).exp();
        let x2 = 3.0 * (2.0 * row.t).exp();
        assert!((row.x[0] - x1).abs() <= 1e-9 * x1, "{row:?}");
        assert!((row.x[1] - x2).abs() <= 1e-9 * x2, "{row:?}");
    }
    assert!(sol.certificate.holds());
}

#[test]
fn initial_values_must_be_moderate_in_the_coefficient_gauge() {
    let spec = AlgebraSpec::diagonal(exp_gauge(&Gauge::special()));
    let a = GenMatrix::new(vec![vec![GenNumber::parse("1", spec.clone()).unwrap()]], Gauge::special()).unwrap();
    let c = vec![GenNumber::new(Net::parse("exp(eps^-1)").unwrap(), spec.clone()).unwrap()];
    assert!(OdeProblem::new(a, c, 0.0, Gauge::special(), spec, (-1.0, 1.0)).is_err());
}
