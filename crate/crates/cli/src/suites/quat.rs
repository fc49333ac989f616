//! The quaternionic fundamental form: spectrum of `Ω^Δ`, angles, canonical
//! frames of complex planes, `Ψ`, the `D, A, E` decomposition and the
//! symmetry group.

use super::Ctx;
use calib_core::linalg::{gaussian_matrix, random_rotation, substream, unit_vector, SeededRng};
use calib_core::quatlab::{
    canonical_basis, dae_quantities, evaluation_identities, lambda_structures, delta_lower_margin, omega_delta_spectrum,
    omega_deviation, psi_matrix_check, qpm_operators, quaternionic_angle, random_complex_plane, random_normal_tensor,
    sample_sp_sp1, space_form_contraction, FourPlane, HyperHermitianSpace,
};
use calib_core::{tolerances, DMatrix, DVector, Result};
use rand::Rng;
use rayon::prelude::*;

const TOL: f64 = tolerances::LINEAR_ALGEBRA;

/// Multiplicities of `Ω^Δ` obtained from the eigenvector families with the
/// eigenvalues they actually carry: the `Θ_0` family lies in the `−1`
/// eigenspace and `Θ_1, Θ_2, Θ_3` in the `1/3` eigenspace.
fn derived_multiplicities(n: usize) -> Vec<(f64, usize)> {
    let nf = n as f64;
    let mut out = vec![(-1.0, 3 * n + 2 * n * (n - 1)), (1.0 / 3.0, 3 * (n - 1) + 6 * n * (n - 1))];
    let top = (2.0 * nf + 1.0) / 3.0;
    match out.iter_mut().find(|(v, _)| (*v - top).abs() < 1e-12) {
        Some(slot) => slot.1 += 3,
        None => out.push((top, 3)),
    }
    out.retain(|(_, m)| *m > 0);
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn spectrum(ctx: &mut Ctx, n: usize) -> Result<()> {
    let space = HyperHermitianSpace::new(n)?;
    let spec = omega_delta_spectrum(&space);
    let anchor = "eigenvalues of Omega^Delta with multiplicities";
    ctx.small(&format!("spectrum.n{n}.decomposition"), "dense eigendecomposition", spec.decomposition_residual, TOL);
    for (value, mult) in &spec.displayed {
        ctx.equality(&format!("spectrum.n{n}.displayed.{value:+.4}"), anchor, spec.multiplicity(*value) as f64, *mult as f64, 0.0);
    }
    ctx.holds(&format!("spectrum.n{n}.displayed-list"), anchor, spec.matches_displayed);
    let derived = derived_multiplicities(n);
    for (value, mult) in &derived {
        ctx.equality(&format!("spectrum.n{n}.derived.{value:+.4}"), "eigenvalue counts from the eigenvector families", spec.multiplicity(*value) as f64, *mult as f64, 0.0);
    }
    let derived_ok = spec.clusters.len() == derived.len()
        && spec.clusters.iter().zip(&derived).all(|(c, d)| c.1 == d.1 && (c.0 - d.0).abs() <= TOL);
    ctx.holds(&format!("spectrum.n{n}.derived-list"), "eigenvalue counts from the eigenvector families", derived_ok);
    let trace: f64 = derived.iter().map(|(v, m)| v * *m as f64).sum();
    ctx.equality(&format!("spectrum.n{n}.trace"), "trace of Omega^Delta", spec.trace, trace, TOL);
    ctx.holds(&format!("spectrum.n{n}.families-span"), "eigenvector families span the bivectors", spec.families_span);

    // Aggregate the family checks by family name, in order of appearance.
    let mut families: Vec<(String, f64, f64, f64)> = Vec::new();
    for c in &spec.checks {
        let dev = (c.rayleigh - c.claimed).abs();
        match families.iter_mut().find(|f| f.0 == c.family) {
            Some(f) => {
                f.1 = f.1.max(c.eigen_residual);
                if dev > f.2 {
                    f.2 = dev;
                    f.3 = c.rayleigh;
                }
            }
            None => families.push((c.family.clone(), c.eigen_residual, dev, c.rayleigh)),
        }
    }
    for (name, eig, _, rayleigh) in &families {
        let claimed = spec.checks.iter().find(|c| &c.family == name).map_or(f64::NAN, |c| c.claimed);
        ctx.small(&format!("spectrum.n{n}.family.{name}.eigenvector"), "family vectors are eigenvectors", *eig, TOL);
        ctx.equality(&format!("spectrum.n{n}.family.{name}.eigenvalue"), anchor, *rayleigh, claimed, TOL);
    }
    Ok(())
}

fn complex_plane_pair(rng: &mut SeededRng, space: &HyperHermitianSpace) -> (DVector<f64>, DVector<f64>, [f64; 3]) {
    let x = unit_vector(rng, space.dim());
    let line = space.quaternionic_line(&x);
    let mut y = unit_vector(rng, space.dim());
    y -= &line * (line.transpose() * &y);
    let y = y.normalize();
    let u = unit_vector(rng, 3);
    (x, y, [u[0], u[1], u[2]])
}

/// Evaluation identities on three mutually orthogonal quaternionic lines.
fn separate_lines_sample(space: &HyperHermitianSpace, rng: &mut SeededRng) -> [f64; 4] {
    let (x, y, _) = complex_plane_pair(rng, space);
    let mut z = unit_vector(rng, space.dim());
    for v in [&x, &y] {
        let l = space.quaternionic_line(v);
        z -= &l * (l.transpose() * &z);
    }
    let z = z.normalize();
    let dirs: Vec<[f64; 3]> = (0..3)
        .map(|_| {
            let u = unit_vector(rng, 3);
            [u[0], u[1], u[2]]
        })
        .collect();
    evaluation_identities(space, [&x, &y, &z], [&dirs[0], &dirs[1], &dirs[2]])
}

/// Angle of a quaternionic line, of a totally complex plane, and the evaluation residuals.
type AngleSample = (f64, f64, [f64; 4]);

fn angles(ctx: &mut Ctx, space: &HyperHermitianSpace) -> Result<()> {
    // Three separate quaternionic lines need quaternionic dimension at least three.
    let eval_space = HyperHermitianSpace::new(space.n().max(3))?;
    let results: Vec<AngleSample> = (0..100)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, (1 << 36) + i as u64);
            let (x, y, dir) = complex_plane_pair(&mut rng, space);
            let line = quaternionic_angle(space, &FourPlane::new(&space.quaternionic_line(&x))?)?.cos_theta;
            let jx = space.direction(&dir);
            let tc = DMatrix::from_columns(&[x.clone(), &jx * &x, y.clone(), &jx * &y]);
            let complex = quaternionic_angle(space, &FourPlane::new(&tc)?)?.cos_theta;
            let ev = separate_lines_sample(&eval_space, &mut rng);
            Ok((line, complex, ev))
        })
        .collect::<Result<_>>()?;
    let worst = |f: &dyn Fn(&AngleSample) -> f64| results.iter().map(f).fold(0.0, f64::max);
    let line = results.iter().map(|r| r.0).fold(f64::NAN, |a, b| if (b - 1.0).abs() >= (a - 1.0).abs() || a.is_nan() { b } else { a });
    ctx.equality("angle.quaternionic-line", "quaternionic lines have angle 1", line, 1.0, tolerances::ALGEBRAIC);
    let third = 1.0 / 3.0;
    let complex = results.iter().map(|r| r.1).fold(f64::NAN, |a, b| if (b - third).abs() >= (a - third).abs() || a.is_nan() { b } else { a });
    ctx.equality("angle.totally-complex", "totally complex planes have angle 1/3", complex, third, tolerances::ALGEBRAIC);
    let names = ["triple", "pair", "mixed", "separate"];
    for (k, name) in names.iter().enumerate() {
        ctx.small(&format!("evaluation.{name}"), "evaluation identities of Omega", worst(&|r| r.2[k]), tolerances::ALGEBRAIC);
    }
    Ok(())
}

struct PlaneSample {
    data_residual: f64,
    psi_max: f64,
    psi_plus: f64,
    psi_minus_flipped: f64,
    psi_mixing: f64,
    psi_conformal: f64,
    displayed: f64,
    derived: f64,
    bounds_ok: bool,
    dl_applicable: bool,
    dl_derived: f64,
    dl_displayed: f64,
    space_form: f64,
    space_form_angle: f64,
}

fn planes(ctx: &mut Ctx, space: &HyperHermitianSpace) -> Result<()> {
    let count = ctx.samples(1000);
    let samples: Vec<PlaneSample> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, (2 << 36) + i as u64);
            let plane = random_complex_plane(&mut rng, space)?;
            let d = canonical_basis(space, &plane)?;
            let psi = psi_matrix_check(space, &d)?;
            let h = random_normal_tensor(&mut rng);
            let dae = dae_quantities(space, &d, &h)?;
            let scale = 1.0 + dae.b_norm_sq;
            let dl = delta_lower_margin(&dae);
            let nu: f64 = rng.random_range(-2.0..2.0);
            let sf = space_form_contraction(space, &d, nu);
            Ok(PlaneSample {
                data_residual: [d.span_residual, d.frame_residual, d.relation_residual, d.phi_residual, d.conformality_residual]
                    .into_iter()
                    .fold(0.0, f64::max),
                psi_max: psi.max_deviation,
                psi_plus: psi.plus_block_deviation,
                psi_minus_flipped: psi.minus_block_flipped_deviation,
                psi_mixing: psi.mixing,
                psi_conformal: psi.plus_conformal_residual.max(psi.minus_conformal_residual),
                displayed: dae.displayed_residual / scale,
                derived: dae.derived_residual / scale,
                bounds_ok: dae.bounds_ok,
                dl_applicable: dl.applicable,
                dl_derived: -dl.margin_derived / scale,
                dl_displayed: -dl.margin_displayed / scale,
                space_form: sf.residual,
                space_form_angle: (sf.rhs - sf.rhs_angle).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let psi_planes = count.min(100);
    let max = |f: fn(&PlaneSample) -> f64, k: usize| samples[..k].iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    ctx.small("canonical-frame", "canonical frames of complex planes", max(|s| s.data_residual, count), TOL);
    ctx.small("psi.displayed", "Psi in canonical frames", max(|s| s.psi_max, psi_planes), TOL);
    ctx.small("psi.plus-block", "Psi on self-dual bivectors", max(|s| s.psi_plus, psi_planes), TOL);
    ctx.small("psi.minus-block-derived", "Psi on anti-self-dual bivectors, derived sign", max(|s| s.psi_minus_flipped, psi_planes), TOL);
    ctx.small("psi.mixing", "Psi preserves the self-dual splitting", max(|s| s.psi_mixing, psi_planes), TOL);
    ctx.small("psi.conformal", "conformality of Psi blocks", max(|s| s.psi_conformal, psi_planes), TOL);
    ctx.small("dae.displayed", "cos(theta) Q~ in terms of D, A, E as displayed", max(|s| s.displayed, count), TOL);
    ctx.small("dae.derived", "cos(theta) Q~ = D - s^2 (A + E)", max(|s| s.derived, count), TOL);
    ctx.holds("dae.bounds", "0 <= D, A, E <= 4/3 |B|^2", samples.iter().all(|s| s.bounds_ok));
    let applicable: Vec<&PlaneSample> = samples.iter().filter(|s| s.dl_applicable).collect();
    ctx.upper_bound("delta-lower.coverage", "samples where tau <= 4(1 - epsilon)/9", 1.0, applicable.len() as f64, 0.0);
    let w = |f: fn(&PlaneSample) -> f64| applicable.iter().map(|s| f(s)).fold(f64::NEG_INFINITY, f64::max);
    ctx.upper_bound("delta-lower.derived", "cos(theta) Q~ >= (4(1 - eps) - 12 tau)/3 |B|^2", w(|s| s.dl_derived), 0.0, tolerances::INEQUALITY);
    ctx.upper_bound("delta-lower.displayed", "cos(theta) Q~ >= (4(1 - eps) - 9 tau)/3 |B|^2", w(|s| s.dl_displayed), 0.0, tolerances::INEQUALITY);
    ctx.small("space-form.contraction", "curvature contraction of the quaternionic space form", max(|s| s.space_form, count), TOL);
    ctx.small("space-form.angle-form", "4 nu s^2 c^2 = 9 nu (1 - cos)(cos - 1/3)", max(|s| s.space_form_angle, count), TOL);

    // Bounds on Q^± over random endomorphisms of the 4-plane.
    let slacks: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, (3 << 36) + i as u64);
            let l = gaussian_matrix(&mut rng, 4, 4);
            [1.0, -1.0]
                .into_iter()
                .map(|sign| {
                    let r = qpm_operators(&l, &lambda_structures(sign));
                    (-r.lower_slack).max(-r.upper_slack).max((r.h_norm_sq - r.h_inner).abs())
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    ctx.upper_bound("q-bounds", "-|l|^2/3 <= <Q l, l> <= |l|^2", slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max), 0.0, TOL);
    Ok(())
}

fn group(ctx: &mut Ctx, space: &HyperHermitianSpace) -> Result<()> {
    let devs: Vec<(f64, f64)> = (0..100)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, (4 << 36) + i as u64);
            let p = sample_sp_sp1(&mut rng, space.n());
            let r = random_rotation(&mut rng, space.dim());
            Ok((omega_deviation(space, &p)?, omega_deviation(space, &r)?))
        })
        .collect::<Result<_>>()?;
    let inv = devs.iter().map(|d| d.0).fold(0.0, f64::max);
    ctx.small("group.sp-sp1", "Sp(n)Sp(1) preserves Omega", inv, tolerances::GROUP_INVARIANCE);
    let broken = devs.iter().filter(|d| d.1 >= tolerances::GROUP_BREAKING).count();
    ctx.upper_bound("group.so-breaking", "random rotations move Omega", 95.0, broken as f64, 0.0);
    Ok(())
}

pub fn run(ctx: &mut Ctx) -> Result<()> {
    let ns = ctx.cfg.quat_n.clone().unwrap_or_else(|| vec![1, 2]);
    for &n in &ns {
        spectrum(ctx, n)?;
    }
    let space = HyperHermitianSpace::new(2)?;
    ctx.small("structures", "quaternion relations of I, J, K", space.relation_residual(), tolerances::ALGEBRAIC);
    angles(ctx, &space)?;
    planes(ctx, &space)?;
    group(ctx, &space)
}
