//! The calibration catalog: constant-coefficient forms of comass one in the
//! standard chart, each shipped with a frame it calibrates.

mod octonion;
pub mod structures;

pub use octonion::{associator, octonion_mul, quat_conj, quat_mul, triple_cross, Octonion, Quaternion};

use crate::error::{Error, Result};
use crate::exterior::{subsets, MultiVector};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use structures::{complex_structure, kahler_form, quaternionic_structures};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CalibrationKind {
    /// `dx¹ ∧ … ∧ dx^m` on `ℝ^{m+n}`.
    Volume { m: usize, n: usize },
    /// `w^k / k!` on `ℂ^{dim_c}`.
    Kahler { k: usize, dim_c: usize },
    /// `Re(dz¹ ∧ … ∧ dz^k)` on `ℂ^k`.
    SpecialLagrangian { k: usize },
    /// `(1/6) Σ_r w_r ∧ w_r` on `ℍ^n`.
    QuaternionicFundamental { n: usize },
    /// `⟨x, y × z × w⟩` on `𝕆 = ℝ⁸`.
    Cayley,
    /// `⟨x, yz⟩` on `Im 𝕆 = ℝ⁷`.
    Associative,
    /// `½⟨x, [y, z, w]⟩` on `Im 𝕆`, equal to the Hodge dual of the associative form.
    Coassociative,
}

impl CalibrationKind {
    /// Parses a catalog name with its integer parameters, e.g.
    /// `("kahler", [2, 2])` or `("quaternionic", [2])`.
    pub fn from_name(name: &str, params: &[usize]) -> Result<Self> {
        let want = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(Error::Invalid(format!(
                    "calibration '{name}' takes {k} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        let kind = match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "volume" => {
                want(2)?;
                CalibrationKind::Volume { m: params[0], n: params[1] }
            }
            "kahler" => {
                want(2)?;
                CalibrationKind::Kahler { k: params[0], dim_c: params[1] }
            }
            "speciallagrangian" | "slag" => {
                want(1)?;
                CalibrationKind::SpecialLagrangian { k: params[0] }
            }
            "quaternionic" | "quaternionicfundamental" => {
                want(1)?;
                CalibrationKind::QuaternionicFundamental { n: params[0] }
            }
            "cayley" => {
                want(0)?;
                CalibrationKind::Cayley
            }
            "associative" => {
                want(0)?;
                CalibrationKind::Associative
            }
            "coassociative" => {
                want(0)?;
                CalibrationKind::Coassociative
            }
            other => return Err(Error::Invalid(format!("unknown calibration '{other}'"))),
        };
        Ok(kind)
    }

    /// The seven catalog entries with small default parameters.
    pub fn catalog() -> Vec<CalibrationKind> {
        vec![
            CalibrationKind::Volume { m: 2, n: 1 },
            CalibrationKind::Kahler { k: 2, dim_c: 3 },
            CalibrationKind::SpecialLagrangian { k: 3 },
            CalibrationKind::QuaternionicFundamental { n: 2 },
            CalibrationKind::Cayley,
            CalibrationKind::Associative,
            CalibrationKind::Coassociative,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub kind: CalibrationKind,
    pub name: String,
    pub form: MultiVector,
    pub m: usize,
    pub n: usize,
    /// `N × m` orthonormal frame with `form(frame) = 1`.
    pub model_frame: DMatrix<f64>,
}

impl Calibration {
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn eval(&self, frame: &DMatrix<f64>) -> Result<f64> {
        self.form.eval_frame(frame)
    }
}

fn coordinate_frame(dim: usize, cols: &[usize]) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(dim, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        f[(i, c)] = 1.0;
    }
    f
}

/// Builds the form of a grade-`k` map on basis vectors.
fn form_from_basis<F: Fn(&[usize]) -> f64>(dim: usize, grade: usize, f: F) -> MultiVector {
    let mut mv = MultiVector::zero(dim, grade);
    for (r, idx) in subsets(dim, grade).iter().enumerate() {
        mv.coeffs_mut()[r] = f(idx);
    }
    mv
}

/// `w^k / k!` for the standard Kähler form on `ℂ^{dim_c}`.
pub fn kahler_power(k: usize, dim_c: usize) -> Result<MultiVector> {
    let w = kahler_form(&complex_structure(dim_c));
    let mut acc = MultiVector::from_coeffs(2 * dim_c, 0, vec![1.0])?;
    for i in 1..=k {
        acc = acc.wedge(&w)?.scale(1.0 / i as f64);
    }
    Ok(acc)
}

/// `Re` and `Im` of `dz¹ ∧ … ∧ dz^k` with `dz^j = dx^j + i dy^j`, where
/// `x^j`, `y^j` are coordinates `2j`, `2j+1` (zero-based).
pub fn holomorphic_volume(k: usize) -> Result<(MultiVector, MultiVector)> {
    let dim = 2 * k;
    let mut re = MultiVector::from_coeffs(dim, 0, vec![1.0])?;
    let mut im = MultiVector::from_coeffs(dim, 0, vec![0.0])?;
    for j in 0..k {
        let dx = MultiVector::basis(dim, &[2 * j])?;
        let dy = MultiVector::basis(dim, &[2 * j + 1])?;
        let nre = re.wedge(&dx)?.sub(&im.wedge(&dy)?)?;
        let nim = re.wedge(&dy)?.add(&im.wedge(&dx)?)?;
        re = nre;
        im = nim;
    }
    Ok((re, im))
}

/// `(1/6) Σ_r w_r ∧ w_r` on `ℝ^{4n}`.
pub fn quaternionic_form(n: usize) -> Result<MultiVector> {
    let mut omega = MultiVector::zero(4 * n, 4);
    for j in quaternionic_structures(n) {
        let w = kahler_form(&j);
        omega = omega.add(&w.wedge(&w)?)?;
    }
    Ok(omega.scale(1.0 / 6.0))
}

pub fn make_calibration(kind: CalibrationKind) -> Result<Calibration> {
    let unsupported = |msg: String| Err(Error::Invalid(msg));
    let (name, form, m, model_frame) = match kind {
        CalibrationKind::Volume { m, n } => {
            if m == 0 {
                return unsupported("volume calibration needs m >= 1".into());
            }
            let dim = m + n;
            let idx: Vec<usize> = (0..m).collect();
            (format!("volume({m},{n})"), MultiVector::basis(dim, &idx)?, m, coordinate_frame(dim, &idx))
        }
        CalibrationKind::Kahler { k, dim_c } => {
            if k == 0 || k > dim_c {
                return unsupported(format!("Kähler calibration needs 1 <= k <= {dim_c}, got k = {k}"));
            }
            let idx: Vec<usize> = (0..2 * k).collect();
            (
                format!("kahler({k},{dim_c})"),
                kahler_power(k, dim_c)?,
                2 * k,
                coordinate_frame(2 * dim_c, &idx),
            )
        }
        CalibrationKind::SpecialLagrangian { k } => {
            if k < 1 {
                return unsupported("special Lagrangian calibration needs k >= 1".into());
            }
            let idx: Vec<usize> = (0..k).map(|j| 2 * j).collect();
            (
                format!("special-lagrangian({k})"),
                holomorphic_volume(k)?.0,
                k,
                coordinate_frame(2 * k, &idx),
            )
        }
        CalibrationKind::QuaternionicFundamental { n } => {
            if n < 1 {
                return unsupported("quaternionic calibration needs n >= 1".into());
            }
            (
                format!("quaternionic({n})"),
                quaternionic_form(n)?,
                4,
                coordinate_frame(4 * n, &[0, 1, 2, 3]),
            )
        }
        CalibrationKind::Cayley => {
            let form = form_from_basis(8, 4, |i| {
                let e = |a: usize| Octonion::basis(i[a]);
                e(0).dot(&triple_cross(&e(1), &e(2), &e(3)))
            });
            ("cayley".to_string(), form, 4, coordinate_frame(8, &[0, 1, 2, 3]))
        }
        CalibrationKind::Associative => (
            "associative".to_string(),
            associative_form(),
            3,
            coordinate_frame(7, &[0, 1, 2]),
        ),
        CalibrationKind::Coassociative => (
            "coassociative".to_string(),
            associative_form().hodge(None)?,
            4,
            coordinate_frame(7, &[3, 4, 5, 6]),
        ),
    };
    let n = form.dim() - m;
    Ok(Calibration { kind, name, form, m, n, model_frame })
}

/// `φ(x, y, z) = ⟨x, yz⟩` on the imaginary octonions (coordinates `e1..e7`).
pub fn associative_form() -> MultiVector {
    form_from_basis(7, 3, |i| {
        let e = |a: usize| Octonion::basis(i[a] + 1);
        e(0).dot(&(e(1) * e(2)))
    })
}

/// `ψ(x, y, z, w) = ½⟨x, [y, z, w]⟩` computed directly from the associator.
pub fn associator_form() -> MultiVector {
    form_from_basis(7, 4, |i| {
        let e = |a: usize| Octonion::basis(i[a] + 1);
        0.5 * e(0).dot(&associator(&e(1), &e(2), &e(3)))
    })
}

/// Right multiplications `R_{e1}`, `R_{e2}` and their product on `𝕆`; on
/// frames `(X, IX, JX, KX)` the Cayley form takes the value `−1`.
pub fn cayley_structures() -> [DMatrix<f64>; 3] {
    let right = |r: usize| {
        let mut m = DMatrix::zeros(8, 8);
        for c in 0..8 {
            let v = Octonion::basis(c) * Octonion::basis(r);
            for (row, x) in v.0.iter().enumerate() {
                m[(row, c)] = *x;
            }
        }
        m
    };
    let i = right(1);
    let j = right(2);
    let k = &i * &j;
    [i, j, k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_frames_are_calibrated() {
        for kind in CalibrationKind::catalog() {
            let c = make_calibration(kind).unwrap();
            let v = c.eval(&c.model_frame).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{}: {v}", c.name);
        }
    }

    #[test]
    fn coassociative_is_star_of_associative() {
        let star = associative_form().hodge(None).unwrap();
        assert_eq!(star, associator_form());
    }

    #[test]
    fn quaternionic_form_has_unit_value_on_first_line() {
        let om = quaternionic_form(1).unwrap();
        assert!((om.coeff(&[0, 1, 2, 3]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn names_parse() {
        assert_eq!(
            CalibrationKind::from_name("Kahler", &[1, 2]).unwrap(),
            CalibrationKind::Kahler { k: 1, dim_c: 2 }
        );
        assert!(CalibrationKind::from_name("quaternionic", &[]).is_err());
        assert!(make_calibration(CalibrationKind::QuaternionicFundamental { n: 0 }).is_err());
    }
}
