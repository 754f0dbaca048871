use thermolyap::calculus::Scalar;
use thermolyap::eos::IdealGas;
use thermolyap::fields::net_quantities;
use thermolyap::functionals::HomogeneousReference;
use thermolyap::simulator::*;
use thermolyap::{EosSpec, Error, FreeEnergy, Grid1D, StateFields};

fn config(n: usize, t_end: f64, output_every: usize, a: [f64; 3]) -> SimConfig {
    SimConfig {
        grid: Grid1D::new(1.0, n).unwrap(),
        eos: EosSpec::ideal_gas(1.0, 1.4, 1.0, 1.0).unwrap(),
        reference: HomogeneousReference::new(1.0, 1.0).unwrap(),
        mu: 1e-2,
        kappa: 1e-2,
        cfl: 0.9,
        t_end,
        output_every,
        init: Perturbation {
            k: 1,
            a_rho: a[0],
            a_v: a[1],
            a_theta: a[2],
        },
    }
}

fn middle_max_residual(records: &[TrajectoryRecord]) -> f64 {
    let lo = records.len() / 10;
    records[lo..records.len() - lo]
        .iter()
        .map(|r| r.decay_residual)
        .fold(0.0, f64::max)
}

#[test]
fn rest_state_is_a_fixed_point() {
    let c = config(40, 1.0, 1, [0.0; 3]);
    let w = init_perturbed(&c).unwrap();
    let dt = stable_time_step(&w, &c).unwrap();
    let next = advance(&w, &c, dt).unwrap();
    assert_eq!(next, w);
}

#[test]
fn thousand_steps_conserve_mass_and_energy() {
    let c = config(64, 1.0, 1, [0.02, 0.02, 0.02]);
    let w0 = init_perturbed(&c).unwrap();
    let dt = stable_time_step(&w0, &c).unwrap();
    let q0 = net_quantities(&c.grid, &w0, &c.eos).unwrap();
    let mut w = w0;
    for _ in 0..1000 {
        w = advance(&w, &c, dt).unwrap();
    }
    let q = net_quantities(&c.grid, &w, &c.eos).unwrap();
    assert!((q.mass - q0.mass).abs() <= 1e-12 * q0.mass);
    assert!((q.total_energy - q0.total_energy).abs() <= 1e-8 * q0.total_energy.abs());
}

#[test]
fn unperturbed_run_has_zero_functional() {
    let tr = run_simulation(&config(32, 0.5, 10, [0.0; 3])).unwrap();
    assert!(tr.records.len() > 2);
    for r in &tr.records {
        assert_eq!(r.v_meq, 0.0);
        assert_eq!(r.decay_residual, 0.0);
    }
}

#[test]
fn temperature_perturbation_decays_monotonically() {
    let tr = run_simulation(&config(64, 5.0, 5, [0.0, 0.0, 0.01])).unwrap();
    let rec = &tr.records;
    let slack = 1e-10 * rec[0].v_meq;
    for p in rec.windows(2) {
        assert!(p[1].v_meq <= p[0].v_meq + slack, "{p:?}");
        assert!(p[1].net_entropy >= p[0].net_entropy - slack, "{p:?}");
    }
    assert!(rec.last().unwrap().v_meq < rec[0].v_meq);
    assert_eq!(tr.final_state.len(), 64);
}

#[test]
fn monitor_reference_matches_initial_mass_and_energy() {
    let c = config(50, 0.1, 1, [0.05, 0.02, 0.03]);
    let tr = run_simulation(&c).unwrap();
    let r = tr.monitor_reference;
    let first = tr.records[0];
    assert!((r.rho_hat * c.grid.length() - first.mass).abs() < 1e-14);
    let e_hat = c.eos.internal_energy(r.theta_hat, r.rho_hat).unwrap();
    assert!((first.mass * e_hat - first.total_energy).abs() < 1e-14);
}

#[test]
fn refinement_reduces_decay_residual() {
    let coarse = run_simulation(&config(50, 10.0, 5, [0.01; 3])).unwrap();
    let fine = run_simulation(&config(100, 10.0, 5, [0.01; 3])).unwrap();
    let (a, b) = (middle_max_residual(&coarse.records), middle_max_residual(&fine.records));
    assert!(b * 2.0 <= a, "coarse {a:e}, fine {b:e}");
}

#[test]
fn time_series_csv_layout() {
    let tr = run_simulation(&config(16, 0.2, 10, [0.01; 3])).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    write_time_series(&path, &tr.records).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,mass,energy,entropy,v_meq,xi_integral,decay_residual"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), tr.records.len());
    let last: Vec<f64> = rows.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 0.2);
    assert_eq!(last[4], tr.records.last().unwrap().v_meq);
}

/// Ideal gas restricted to densities below 1.05.
#[derive(Debug)]
struct Cramped(IdealGas);

impl FreeEnergy for Cramped {
    fn kind(&self) -> &'static str {
        "cramped"
    }
    fn psi<S: Scalar>(&self, theta: S, rho: S) -> S {
        self.0.psi(theta, rho)
    }
    fn max_density(&self) -> f64 {
        1.05
    }
}

#[test]
fn leaving_the_domain_aborts_with_last_state() {
    let mut c = config(32, 2.0, 1, [0.0, 0.1, 0.0]);
    c.eos = EosSpec::new(Cramped(IdealGas::new(1.0, 1.4, 1.0, 1.0).unwrap()));
    match run_simulation(&c) {
        Err(Error::SimulationAborted { t, last_state, reason }) => {
            assert!(t > 0.0 && t < 2.0, "t = {t}: {reason}");
            assert_eq!(last_state.len(), 32);
            last_state.check_admissible().unwrap();
        }
        other => panic!("expected abort, got {:?}", other.map(|t| t.steps)),
    }
}

#[test]
fn inadmissible_input_to_advance_is_rejected() {
    let c = config(8, 1.0, 1, [0.0; 3]);
    let w = StateFields::uniform_rest(8, -1.0, 1.0);
    assert!(matches!(advance(&w, &c, 1e-3), Err(Error::Domain(_))));
}
