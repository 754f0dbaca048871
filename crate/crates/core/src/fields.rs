//! Uniform 1D cell grids, per-cell state fields, midpoint quadrature and
//! snapshot CSV files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::eos::EosSpec;
use crate::error::{Error, Result};

/// The interval [0, L] split into `n_cells` equal cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid1D {
    length: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(length: f64, n_cells: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("grid length must be positive, got {length}")));
        }
        if n_cells < 4 {
            return Err(Error::Config(format!("grid needs at least 4 cells, got {n_cells}")));
        }
        Ok(Self { length, n_cells })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.length / self.n_cells as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Midpoint rule Σ fᵢ Δx, summed in ascending index order.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.n_cells {
            return Err(Error::Shape {
                expected: self.n_cells,
                actual: f.len(),
            });
        }
        let dx = self.dx();
        Ok(f.iter().fold(0.0, |acc, &fi| acc + fi * dx))
    }

    /// Integral of `f(i)` over cells.
    pub fn integrate_with<F: FnMut(usize) -> f64>(&self, mut f: F) -> f64 {
        let dx = self.dx();
        (0..self.n_cells).fold(0.0, |acc, i| acc + f(i) * dx)
    }
}

/// Density, velocity and temperature per cell.
///
/// Construction only checks shapes, so the type also serves as a direction
/// of variation. Use [`StateFields::check_admissible`] for states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateFields {
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
}

impl StateFields {
    pub fn new(rho: Vec<f64>, v: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        for other in [v.len(), theta.len()] {
            if other != rho.len() {
                return Err(Error::Shape {
                    expected: rho.len(),
                    actual: other,
                });
            }
        }
        Ok(Self { rho, v, theta })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            rho: vec![0.0; n],
            v: vec![0.0; n],
            theta: vec![0.0; n],
        }
    }

    /// The uniform state (ρ, 0, θ).
    pub fn uniform_rest(n: usize, rho: f64, theta: f64) -> Self {
        Self {
            rho: vec![rho; n],
            v: vec![0.0; n],
            theta: vec![theta; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// `self + s·dir`.
    pub fn axpy(&self, s: f64, dir: &StateFields) -> StateFields {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        StateFields {
            rho: f(&self.rho, &dir.rho),
            v: f(&self.v, &dir.v),
            theta: f(&self.theta, &dir.theta),
        }
    }

    pub fn scaled(&self, s: f64) -> StateFields {
        let f = |a: &[f64]| a.iter().map(|x| s * x).collect();
        StateFields {
            rho: f(&self.rho),
            v: f(&self.v),
            theta: f(&self.theta),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.rho
            .iter()
            .chain(&self.v)
            .chain(&self.theta)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn check_len(&self, grid: &Grid1D) -> Result<()> {
        if self.len() != grid.n_cells() {
            return Err(Error::Shape {
                expected: grid.n_cells(),
                actual: self.len(),
            });
        }
        Ok(())
    }

    /// ρ > 0, θ > 0 and all values finite.
    pub fn check_admissible(&self) -> Result<()> {
        for i in 0..self.len() {
            let (r, v, t) = (self.rho[i], self.v[i], self.theta[i]);
            if !(r > 0.0 && r.is_finite() && t > 0.0 && t.is_finite() && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "cell {i}: rho = {r}, v = {v}, theta = {t}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NetQuantities {
    pub mass: f64,
    pub total_energy: f64,
    pub entropy: f64,
    pub kinetic: f64,
}

/// Net mass, total energy, entropy and kinetic energy of a state.
pub fn net_quantities(grid: &Grid1D, w: &StateFields, eos: &EosSpec) -> Result<NetQuantities> {
    w.check_len(grid)?;
    let n = w.len();
    let mut e = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for i in 0..n {
        e.push(eos.internal_energy(w.theta[i], w.rho[i])?);
        eta.push(eos.entropy(w.theta[i], w.rho[i])?);
    }
    let kinetic_density = |i: usize| {
        let p = w.rho[i] * w.v[i];
        0.5 * p * p / w.rho[i]
    };
    Ok(NetQuantities {
        mass: grid.integrate_with(|i| w.rho[i]),
        total_energy: grid.integrate_with(|i| kinetic_density(i) + w.rho[i] * e[i]),
        entropy: grid.integrate_with(|i| w.rho[i] * eta[i]),
        kinetic: grid.integrate_with(kinetic_density),
    })
}

const SNAPSHOT_HEADER: &str = "x,rho,v,theta";

/// Writes `x,rho,v,theta` rows at shortest round-trip precision.
pub fn write_snapshot(path: &Path, grid: &Grid1D, w: &StateFields) -> Result<()> {
    w.check_len(grid)?;
    w.check_admissible()?;
    let mut out = String::with_capacity(64 * w.len());
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for i in 0..w.len() {
        writeln!(out, "{},{},{},{}", grid.center(i), w.rho[i], w.v[i], w.theta[i])
            .expect("writing to a String");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a snapshot, recovering the grid from the cell centers.
///
/// Rows are numbered from 1 starting at the first data row.
pub fn read_snapshot(path: &Path) -> Result<(Grid1D, StateFields)> {
    let text = fs::read_to_string(path)?;
    let fail = |row: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some(SNAPSHOT_HEADER) => {}
        other => {
            return Err(fail(
                0,
                format!("expected header `{SNAPSHOT_HEADER}`, found {other:?}"),
            ))
        }
    }

    let (mut x, mut rho, mut v, mut theta) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let row = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(fail(row, format!("expected 4 columns, found {}", cols.len())));
        }
        let mut vals = [0.0; 4];
        for (slot, col) in vals.iter_mut().zip(&cols) {
            *slot = col
                .parse::<f64>()
                .ok()
                .filter(|y| y.is_finite())
                .ok_or_else(|| fail(row, format!("not a finite number: {col:?}")))?;
        }
        if vals[1] <= 0.0 {
            return Err(fail(row, format!("rho must be positive, got {}", vals[1])));
        }
        if vals[3] <= 0.0 {
            return Err(fail(row, format!("theta must be positive, got {}", vals[3])));
        }
        x.push((row, vals[0]));
        rho.push(vals[1]);
        v.push(vals[2]);
        theta.push(vals[3]);
    }

    let n = x.len();
    if n < 4 {
        return Err(fail(n, format!("need at least 4 cells, found {n}")));
    }
    let length = 2.0 * n as f64 * x[0].1;
    let grid = Grid1D::new(length, n).map_err(|e| fail(1, e.to_string()))?;
    let tol = 1e-9 * grid.dx();
    for (i, &(row, xi)) in x.iter().enumerate() {
        if (xi - grid.center(i)).abs() > tol {
            return Err(fail(
                row,
                format!("cell centers not uniform: x = {xi}, expected {}", grid.center(i)),
            ));
        }
    }
    Ok((grid, StateFields { rho, v, theta }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadrature_examples() {
        let g = Grid1D::new(2.0, 8).unwrap();
        assert_eq!(g.integrate(&[1.0; 8]).unwrap(), 2.0);
        let g = Grid1D::new(1.0, 10).unwrap();
        let r = g.integrate(&g.centers()).unwrap();
        assert!((r - 0.5).abs() <= 1e-15);
        let g = Grid1D::new(1.0, 100).unwrap();
        let sq: Vec<f64> = g.centers().iter().map(|x| x * x).collect();
        let r = g.integrate(&sq).unwrap();
        // midpoint error is exactly -Δx²/24 · ∫f'' = -1e-4/12
        assert!((r - (1.0 / 3.0 - 1e-4 / 12.0)).abs() < 1e-14);
        assert!(matches!(g.integrate(&[1.0; 3]), Err(Error::Shape { .. })));
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(1.0, 3).is_err());
        assert!(Grid1D::new(0.0, 8).is_err());
        let g = Grid1D::new(1.0, 4).unwrap();
        assert_eq!(g.centers(), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn net_quantity_examples() {
        let g = Grid1D::new(1.0, 8).unwrap();
        let eos = EosSpec::ideal_gas(1.0, 1.4, 1.0, 1.0).unwrap();
        let q = net_quantities(&g, &StateFields::uniform_rest(8, 1.0, 1.0), &eos).unwrap();
        assert_eq!((q.mass, q.kinetic, q.total_energy), (1.0, 0.0, 0.0));

        let w = StateFields::new(vec![2.0; 8], vec![3.0; 8], vec![1.0; 8]).unwrap();
        assert!((net_quantities(&g, &w, &eos).unwrap().kinetic - 9.0).abs() < 1e-14);

        let eos = EosSpec::ideal_gas(2.0, 1.5, 1.0, 1.0).unwrap();
        let w = StateFields::uniform_rest(8, 1.0, std::f64::consts::E);
        assert!((net_quantities(&g, &w, &eos).unwrap().entropy - 2.0).abs() < 1e-14);

        let bad = StateFields::uniform_rest(8, -1.0, 1.0);
        assert!(matches!(net_quantities(&g, &bad, &eos), Err(Error::Domain(_))));
    }

    #[test]
    fn net_quantities_converge_at_second_order() {
        let eos = EosSpec::ideal_gas(1.0, 1.4, 1.0, 1.0).unwrap();
        let field = |n: usize| {
            let g = Grid1D::new(1.0, n).unwrap();
            let x = g.centers();
            let w = StateFields::new(
                x.iter().map(|x| 1.0 + 0.3 * (3.0 * x).sin()).collect(),
                x.iter().map(|x| (2.0 * x).cos()).collect(),
                x.iter().map(|x| 1.5 + 0.2 * x * x).collect(),
            )
            .unwrap();
            net_quantities(&g, &w, &eos).unwrap().total_energy
        };
        let (a, b, c) = (field(40), field(80), field(160));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn snapshot_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let g = Grid1D::new(0.7, 13).unwrap();
        let w = StateFields::new(
            (0..13).map(|i| 1.0 + (i as f64).sin() / 3.0).collect(),
            (0..13).map(|i| (i as f64 * 0.1).exp() - 1.3).collect(),
            (0..13).map(|i| 0.1 + 1.0 / (i as f64 + 0.3)).collect(),
        )
        .unwrap();
        write_snapshot(&path, &g, &w).unwrap();
        let (g2, w2) = read_snapshot(&path).unwrap();
        assert_eq!(w, w2);
        assert_eq!(g2.n_cells(), 13);
        assert!((g2.length() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn snapshot_errors_name_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(
            &path,
            "x,rho,v,theta\n0.125,1,0,1\n0.375,1,0,1\n0.625,-1,0,1\n0.875,1,0,1\n",
        )
        .unwrap();
        match read_snapshot(&path) {
            Err(Error::Format { row, .. }) => assert_eq!(row, 3),
            other => panic!("{other:?}"),
        }
        fs::write(
            &path,
            "x,rho,v,theta\n0.125,1,0,1\n0.375,1,0,1\n0.6,1,0,1\n0.875,1,0,1\n",
        )
        .unwrap();
        match read_snapshot(&path) {
            Err(Error::Format { row, .. }) => assert_eq!(row, 3),
            other => panic!("{other:?}"),
        }
        fs::write(&path, "x,rho,v,theta\n0.125,1,0\n").unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Format { row: 1, .. })));
    }

    #[test]
    fn four_cell_snapshot_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("four.csv");
        fs::write(
            &path,
            "x,rho,v,theta\n0.125,1,0,1\n0.375,1,0,1\n0.625,1,0,1\n0.875,1,0,1\n",
        )
        .unwrap();
        let (g, _) = read_snapshot(&path).unwrap();
        assert_eq!((g.length(), g.n_cells()), (1.0, 4));
    }

    proptest! {
        #[test]
        fn integrate_is_linear_and_monotone(
            f in prop::collection::vec(-10.0f64..10.0, 16),
            d in prop::collection::vec(0.0f64..5.0, 16),
            a in -3.0f64..3.0,
        ) {
            let g = Grid1D::new(1.3, 16).unwrap();
            let fg: Vec<f64> = f.iter().zip(&d).map(|(x, y)| x + y).collect();
            prop_assert!(g.integrate(&f).unwrap() <= g.integrate(&fg).unwrap());
            let af: Vec<f64> = f.iter().map(|x| a * x).collect();
            let lhs = g.integrate(&af).unwrap();
            let rhs = a * g.integrate(&f).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn kinetic_via_momentum_matches_direct(rho in 1e-3f64..1e3, v in -1e3f64..1e3) {
            let p = rho * v;
            let a = 0.5 * p * p / rho;
            let b = 0.5 * rho * v * v;
            prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs());
        }
    }
}
