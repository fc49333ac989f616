//! The integral Omega-isoperimetric inequality and the Heinz-type bounds on
//! meshed domains.

use super::Ctx;
use calib_core::subgeom::{integral_isoperimetric, ImmersionSpec, MeshDomain};
use calib_core::{tolerances, MultiVector, Result};
use rayon::prelude::*;

struct Domain {
    name: &'static str,
    spec: ImmersionSpec,
    mesh: fn(usize, usize) -> Result<MeshDomain>,
}

fn domains() -> Vec<Domain> {
    vec![
        Domain {
            name: "sphere-cap-small",
            spec: ImmersionSpec::SphereGraph { radius: 1.0 },
            mesh: |nr, nt| MeshDomain::disc([0.0, 0.0], 0.5, nr, nt),
        },
        Domain {
            name: "sphere-cap-large",
            spec: ImmersionSpec::SphereGraph { radius: 1.0 },
            mesh: |nr, nt| MeshDomain::disc([0.0, 0.0], 0.9, nr, nt),
        },
        Domain {
            name: "sphere-offcenter",
            spec: ImmersionSpec::SphereGraph { radius: 2.0 },
            mesh: |nr, nt| MeshDomain::disc([0.3, 0.2], 0.8, nr, nt),
        },
        Domain {
            name: "sphere-annulus",
            spec: ImmersionSpec::SphereGraph { radius: 1.5 },
            mesh: |nr, nt| MeshDomain::annulus([0.0, 0.0], 0.3, 1.0, nr, nt),
        },
        Domain {
            name: "catenoid-annulus",
            spec: ImmersionSpec::Catenoid,
            mesh: |nr, nt| MeshDomain::annulus([0.0, 0.0], 1.2, 2.0, nr, nt),
        },
        Domain {
            name: "helicoid-box",
            spec: ImmersionSpec::Helicoid,
            mesh: |nr, _| MeshDomain::cuboid(&[0.5, -0.5], &[1.5, 0.5], nr),
        },
        Domain {
            name: "enneper-disc",
            spec: ImmersionSpec::Enneper,
            mesh: |nr, nt| MeshDomain::disc([0.0, 0.0], 0.8, nr, nt),
        },
        Domain {
            name: "tilted-plane",
            spec: ImmersionSpec::Plane { slope: 0.5 },
            mesh: |nr, nt| MeshDomain::disc([0.0, 0.0], 1.0, nr, nt),
        },
        Domain {
            name: "polynomial-graph",
            spec: ImmersionSpec::Graph { m: 2, f: vec!["0.3*x1^2 - 0.2*x1*x2 + 0.1*x2^3".into()] },
            mesh: |nr, nt| MeshDomain::disc([0.1, 0.0], 0.7, nr, nt),
        },
        Domain {
            name: "cmc-cap-m2-c1",
            spec: ImmersionSpec::CmcGraph { m: 2, c: 1.0 },
            mesh: |nr, nt| MeshDomain::disc([0.0, 0.0], 0.5, nr, nt),
        },
        Domain {
            name: "cmc-cap-m2-c0.5",
            spec: ImmersionSpec::CmcGraph { m: 2, c: 0.5 },
            mesh: |nr, nt| MeshDomain::disc([0.0, 0.0], 0.6, nr, nt),
        },
        Domain {
            name: "cmc-box-m3-c1.5",
            spec: ImmersionSpec::CmcGraph { m: 3, c: 1.5 },
            mesh: |nr, _| MeshDomain::cuboid(&[-0.2, -0.2, -0.2], &[0.2, 0.2, 0.2], nr.min(17)),
        },
    ]
}

pub fn run(ctx: &mut Ctx) -> Result<()> {
    let (nr, nt) = (ctx.cfg.mesh.nr, ctx.cfg.mesh.nt);
    let results: Vec<_> = domains()
        .par_iter()
        .map(|d| {
            let imm = d.spec.build()?;
            let m = imm.param_dim();
            let form = MultiVector::basis(m + 1, &(0..m).collect::<Vec<_>>())?;
            let mesh = (d.mesh)(nr, nt)?;
            integral_isoperimetric(imm.as_ref(), &form, &mesh, tolerances::NORMAL_DERIVATIVE_STEP)
        })
        .collect::<Result<_>>()?;
    for (d, r) in domains().iter().zip(&results) {
        // Caps are equality cases, so the slack is compared at quadrature accuracy.
        let tol = tolerances::MESH_QUADRATURE * r.rhs.abs().max(1.0);
        ctx.upper_bound(&format!("isoperimetric.{}", d.name), "integral Omega-isoperimetric inequality", r.lhs, r.rhs, tol);
        if let Some(h) = &r.heinz {
            ctx.upper_bound(&format!("heinz.{}", d.name), "m |H| inf cos(theta) <= sup sin(theta) A/V", h.lhs, h.rhs, tol);
        }
        if let Some((radius, bound)) = r.heinz_radius {
            ctx.upper_bound(&format!("heinz-radius.{}", d.name), "radius <= 1/|H|", radius, bound, tolerances::INEQUALITY);
        }
    }
    Ok(())
}
