//! Octonions and the special calibrations: associative, coassociative and
//! Cayley forms and their morphisms `Φ`.

use super::identities::{near_frame, record_pointwise};
use super::Ctx;
use calib_core::calibrations::{
    associative_form, associator, associator_form, cayley_structures, make_calibration, triple_cross, CalibrationKind,
    Octonion,
};
use calib_core::linalg::{gaussian_vector, random_frame, substream, unit_vector, SeededRng};
use calib_core::subgeom::identities::pointwise_bounds;
use calib_core::subgeom::{CalibratedPoint, SecondForm};
use calib_core::{tolerances, DMatrix, DVector, Result};
use rayon::prelude::*;

const TOL: f64 = tolerances::ALGEBRAIC;

fn random_octonion(rng: &mut SeededRng) -> Octonion {
    Octonion::from_slice(gaussian_vector(rng, 8).as_slice())
}

fn imaginary(v: &[f64]) -> Octonion {
    Octonion::imaginary(v)
}

fn from_column(m: &DMatrix<f64>, k: usize) -> Vec<f64> {
    m.column(k).iter().copied().collect()
}

/// Largest violation of the octonion algebra laws over one random sample.
fn algebra_sample(rng: &mut SeededRng) -> [f64; 5] {
    let (a, b, c) = (random_octonion(rng), random_octonion(rng), random_octonion(rng));
    let norm = ((a * b).norm() - a.norm() * b.norm()).abs() / (a.norm() * b.norm());
    let alt = associator(&a, &a, &b).norm().max(associator(&b, &a, &a).norm());
    let skew = (associator(&a, &b, &c) + associator(&b, &a, &c)).norm();
    // Orthonormal triples: triple cross product is a unit vector orthogonal to all three.
    let f = random_frame(rng, 8, 3);
    let [x, y, z] = [0, 1, 2].map(|k| Octonion::from_slice(&from_column(&f, k)));
    let t = triple_cross(&x, &y, &z);
    let cross = (t.norm() - 1.0).abs().max(t.dot(&x).abs()).max(t.dot(&y).abs()).max(t.dot(&z).abs());
    // Quaternions associate.
    let q = |rng: &mut SeededRng| {
        let g = gaussian_vector(rng, 4);
        Octonion::from_slice(&[g[0], g[1], g[2], g[3], 0.0, 0.0, 0.0, 0.0])
    };
    let quat = associator(&q(rng), &q(rng), &q(rng)).norm();
    [norm, alt, skew, cross, quat]
}

/// `φ(x, y, z)² + ¼‖[x, y, z]‖² = 1` on orthonormal imaginary triples and the
/// alternation of `ψ = ½⟨x, [y, z, w]⟩`.
fn form_sample(rng: &mut SeededRng) -> Result<[f64; 3]> {
    let f = random_frame(rng, 7, 4);
    let v: Vec<Octonion> = (0..4).map(|k| imaginary(&from_column(&f, k))).collect();
    let phi = associative_form().eval_frame(&f.columns(0, 3).into_owned())?;
    let assoc = associator(&v[0], &v[1], &v[2]).norm_squared_quarter();
    let identity = (phi * phi + assoc - 1.0).abs();
    let psi = associator_form();
    let direct = 0.5 * v[0].dot(&associator(&v[1], &v[2], &v[3]));
    let from_form = psi.eval_frame(&f)?;
    let swapped = 0.5 * v[1].dot(&associator(&v[0], &v[2], &v[3]));
    Ok([identity, (direct - from_form).abs(), (direct + swapped).abs()])
}

trait QuarterNorm {
    fn norm_squared_quarter(&self) -> f64;
}

impl QuarterNorm for Octonion {
    fn norm_squared_quarter(&self) -> f64 {
        0.25 * self.dot(self)
    }
}

/// `Φ(X_1)` from the calibrated point against the octonionic formula.
fn phi_formula_residual(kind: CalibrationKind, rng: &mut SeededRng) -> Result<f64> {
    let cal = make_calibration(kind)?;
    let (t, n) = near_frame(rng, &cal);
    let cp = CalibratedPoint::new(&cal.form, t.clone(), n.clone())?;
    let phi1: DVector<f64> = &n * cp.phi.column(0);
    let col = |k: usize| from_column(&t, k);
    let raw: Vec<f64> = match kind {
        CalibrationKind::Associative => (imaginary(&col(1)) * imaginary(&col(2))).0[1..].to_vec(),
        CalibrationKind::Coassociative => {
            associator(&imaginary(&col(1)), &imaginary(&col(2)), &imaginary(&col(3))).scale(0.5).0[1..].to_vec()
        }
        _ => triple_cross(
            &Octonion::from_slice(&col(1)),
            &Octonion::from_slice(&col(2)),
            &Octonion::from_slice(&col(3)),
        )
        .0
        .to_vec(),
    };
    let raw = DVector::from_vec(raw);
    let perp = &n * (n.transpose() * raw);
    Ok((phi1 - perp).abs().max())
}

pub fn run(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples(1000);
    let seed = ctx.cfg.seed;
    let alg: Vec<[f64; 5]> = (0..count).into_par_iter().map(|i| algebra_sample(&mut substream(seed, i as u64))).collect();
    let names = [
        ("norm", "|ab| = |a||b|"),
        ("alternative", "associator vanishes on repeated arguments"),
        ("associator-skew", "associator is alternating"),
        ("triple-cross", "triple cross product of an orthonormal triple is a unit normal"),
        ("quaternions-associate", "associator vanishes on the quaternions"),
    ];
    for (k, (id, anchor)) in names.iter().enumerate() {
        ctx.small(&format!("octonion.{id}"), anchor, alg.iter().map(|a| a[k]).fold(0.0, f64::max), TOL);
    }
    let e = Octonion::basis;
    ctx.small("octonion.e1e2", "e1 e2 = e3", ((e(1) * e(2)) - e(3)).norm(), 0.0);

    let forms: Vec<[f64; 3]> =
        (0..count).into_par_iter().map(|i| form_sample(&mut substream(seed, (1 << 36) + i as u64))).collect::<Result<_>>()?;
    ctx.small("associative.associator-identity", "phi^2 + |[x,y,z]|^2/4 = 1", forms.iter().map(|f| f[0]).fold(0.0, f64::max), TOL);
    ctx.small("coassociative.associator-form", "psi(x,y,z,w) = <x,[y,z,w]>/2", forms.iter().map(|f| f[1]).fold(0.0, f64::max), TOL);
    ctx.small("coassociative.alternating", "psi is alternating", forms.iter().map(|f| f[2]).fold(0.0, f64::max), TOL);
    let star = associative_form().hodge(None)?;
    ctx.small("coassociative.hodge", "psi = *phi", star.sub(&associator_form())?.norm(), TOL);

    // Cayley form on (X, IX, JX, KX) for the right-multiplication structures.
    let cayley = make_calibration(CalibrationKind::Cayley)?;
    let [i, j, k] = cayley_structures();
    let cay: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|s| {
            let x = unit_vector(&mut substream(seed, (2 << 36) + s as u64), 8);
            let f = DMatrix::from_columns(&[x.clone(), &i * &x, &j * &x, &k * &x]);
            Ok((cayley.form.eval_frame(&f)?.abs() - 1.0).abs())
        })
        .collect::<Result<_>>()?;
    ctx.small("cayley.quaternionic-frames", "Cayley form is +-1 on (X, IX, JX, KX)", cay.iter().copied().fold(0.0, f64::max), TOL);

    for (ci, kind) in [CalibrationKind::Associative, CalibrationKind::Coassociative, CalibrationKind::Cayley].into_iter().enumerate() {
        let cal = make_calibration(kind)?;
        let res: Vec<f64> = (0..count.min(200))
            .into_par_iter()
            .map(|s| phi_formula_residual(kind, &mut substream(seed, ((3 + ci as u64) << 36) + s as u64)))
            .collect::<Result<_>>()?;
        ctx.small(&format!("phi-formula.{}", cal.name), "Phi(X_1) from the octonion product", res.iter().copied().fold(0.0, f64::max), tolerances::LINEAR_ALGEBRA);
        let bounds: Vec<_> = (0..count)
            .into_par_iter()
            .map(|s| {
                let mut rng = substream(seed, ((6 + ci as u64) << 36) + s as u64);
                let (t, n) = near_frame(&mut rng, &cal);
                let cp = CalibratedPoint::new(&cal.form, t, n.clone())?;
                let b = SecondForm::random(&mut rng, &n, cal.m);
                Ok(pointwise_bounds(&cp, &b, 16, &mut rng))
            })
            .collect::<Result<_>>()?;
        record_pointwise(ctx, &cal.name, &bounds);
    }
    Ok(())
}
