//! Real potentials sampled at the cell centers of a partition.

use alloc::sync::Arc;
use alloc::vec::Vec;


use crate::error::Error;
use crate::geometry::Grid;

/// A potential to be sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// The constant potential `q(x) = c` on the whole cube.
    Constant(f64),
    /// The Yukawa-type potential `q(x) = exp(-|x|) / |x|`, singular at the
    /// origin.
    Yukawa,
    /// Externally supplied per-cell values in grid order.
    Tabulated(Vec<f64>),
}

/// A real scalar field given by one value per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl RealField {
    /// Wraps per-cell values, validating the length against the grid.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, Error> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("field length must equal the number of grid cells"));
        }
        Ok(RealField { grid, values })
    }

    /// The underlying partition.
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Per-cell values in grid order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The volume-weighted L2 norm `sqrt(sum_p |v_p|^2 vol_p)`.
    pub fn weighted_l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.volumes())
            .map(|(v, vol)| v * v * vol)
            .sum::<f64>()
            .sqrt()
    }
}

/// Samples `spec` at every cell center of `grid`.
///
/// Fails when a sampled value would be non-finite: a non-finite constant, a
/// tabulated vector of the wrong length or with non-finite entries, or the
/// Yukawa potential on a grid with a cell center at the origin.
pub fn sample_potential(spec: &PotentialSpec, grid: &Arc<Grid>) -> Result<RealField, Error> {
    let values = match spec {
        PotentialSpec::Constant(c) => {
            if !c.is_finite() {
                return Err(Error::InvalidArgument("constant potential value must be finite"));
            }
            alloc::vec![*c; grid.len()]
        }
        PotentialSpec::Yukawa => {
            let mut values = Vec::with_capacity(grid.len());
            for p in grid.points() {
                let r = p.norm();
                if r == 0.0 {
                    return Err(Error::Singularity(
                        "Yukawa potential evaluated at a cell center at the origin",
                    ));
                }
                values.push((-r).exp() / r);
            }
            values
        }
        PotentialSpec::Tabulated(values) => {
            if values.len() != grid.len() {
                return Err(Error::InvalidArgument(
                    "tabulated potential length must equal the number of grid cells",
                ));
            }
            if !values.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidArgument("tabulated potential values must be finite"));
            }
            values.clone()
        }
    };
    RealField::new(Arc::clone(grid), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{partition_cube, Point3};
    use alloc::vec;

    fn unit_grid(n: usize) -> Arc<Grid> {
        Arc::new(partition_cube(Point3::ZERO, 1.0, n).unwrap())
    }

    #[test]
    fn constant_potential_is_uniform() {
        let grid = unit_grid(10);
        let q = sample_potential(&PotentialSpec::Constant(10.0), &grid).unwrap();
        assert_eq!(q.values().len(), 1000);
        assert!(q.values().iter().all(|&v| v == 10.0));

        let zero = sample_potential(&PotentialSpec::Constant(0.0), &grid).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        assert!(sample_potential(&PotentialSpec::Constant(f64::NAN), &grid).is_err());
    }

    #[test]
    fn yukawa_matches_frozen_value_at_innermost_cell() {
        let grid = unit_grid(10);
        let q = sample_potential(&PotentialSpec::Yukawa, &grid).unwrap();
        // Cell (5, 5, 5) has center (0.05, 0.05, 0.05), radius 0.05 sqrt(3);
        // exp(-r)/r evaluated there in extended precision:
        let p = grid.flat_index(5, 5, 5);
        let expected = 10.589_083_255_208_621;
        assert!(
            (q.values()[p] - expected).abs() <= 1e-12 * expected,
            "got {}, expected {expected}",
            q.values()[p]
        );
    }

    #[test]
    fn yukawa_matches_frozen_value_at_generic_cell() {
        let grid = unit_grid(10);
        let q = sample_potential(&PotentialSpec::Yukawa, &grid).unwrap();
        // Cell center (0.15, -0.25, 0.35): exp(-r)/r with r = sqrt(0.1925).
        let p = grid.flat_index(6, 2, 8);
        let center = grid.points()[p];
        assert!((center.x - 0.15).abs() < 1e-15);
        assert!((center.y + 0.25).abs() < 1e-15);
        assert!((center.z - 0.35).abs() < 1e-15);
        let expected = 1.392_067_832_123_134;
        assert!(
            (q.values()[p] - expected).abs() <= 1e-12 * expected,
            "got {}, expected {expected}",
            q.values()[p]
        );
    }

    #[test]
    fn yukawa_is_positive_and_radially_decreasing() {
        let grid = unit_grid(10);
        let q = sample_potential(&PotentialSpec::Yukawa, &grid).unwrap();
        // exp(-r)/r depends only on r and is strictly decreasing, so sorting
        // cells by radius must sort values in decreasing order.
        let mut by_radius: Vec<(f64, f64)> = grid
            .points()
            .iter()
            .zip(q.values())
            .map(|(p, &v)| (p.norm(), v))
            .collect();
        by_radius.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in by_radius.windows(2) {
            assert!(w[0].1 > 0.0);
            assert!(
                w[1].1 <= w[0].1 + 1e-12,
                "value should not increase with radius: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn yukawa_rejects_grid_with_origin_center() {
        // n odd with the cube centered at the origin puts a cell center at 0
        // only when n is odd and ... for n = 1 the single center is the origin.
        let grid = unit_grid(1);
        assert!(matches!(
            sample_potential(&PotentialSpec::Yukawa, &grid),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn tabulated_potential_round_trips_and_validates() {
        let grid = unit_grid(2);
        let vals = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let q = sample_potential(&PotentialSpec::Tabulated(vals.clone()), &grid).unwrap();
        assert_eq!(q.values(), &vals[..]);

        assert!(sample_potential(&PotentialSpec::Tabulated(vec![1.0; 7]), &grid).is_err());
        let mut bad = vals;
        bad[3] = f64::INFINITY;
        assert!(sample_potential(&PotentialSpec::Tabulated(bad), &grid).is_err());
    }

    #[test]
    fn weighted_norm_of_constant_is_value_times_sqrt_volume() {
        let grid = unit_grid(5);
        let q = sample_potential(&PotentialSpec::Constant(10.0), &grid).unwrap();
        // sum |10|^2 * vol = 100 * 1, so the norm is 10.
        assert!((q.weighted_l2_norm() - 10.0).abs() < 1e-12);
    }
}
