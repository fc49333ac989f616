use calib_bench::{calibration_form, graph};
use calib_core::calibrations::CalibrationKind;
use calib_core::cheeger::{bruteforce_cheeger, Convention};
use calib_core::exterior::{comass, ComassOptions};
use calib_core::quatlab::{omega_delta_spectrum, HyperHermitianSpace};
use calib_core::subgeom::{frame_at, ImmersionSpec};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn bench_comass(c: &mut Criterion) {
    let mut group = c.benchmark_group("comass");
    group.sample_size(10);
    for (name, kind) in [("associative", CalibrationKind::Associative), ("cayley", CalibrationKind::Cayley)] {
        let form = calibration_form(kind);
        let opts = ComassOptions { restarts: 20, grad_tol: 1e-9, max_iter: 5000, seed: 1 };
        group.bench_function(name, |b| b.iter(|| comass(black_box(&form), &opts).value));
    }
    group.finish();
}

fn bench_cheeger(c: &mut Criterion) {
    let mut group = c.benchmark_group("bruteforce_cheeger");
    for n in [10, 14] {
        let g = graph(n);
        group.bench_function(format!("n{n}"), |b| b.iter(|| bruteforce_cheeger(black_box(&g), Convention::HalfVolume).unwrap().value));
    }
    group.finish();
}

fn bench_frame(c: &mut Criterion) {
    let imm = ImmersionSpec::Enneper.build().unwrap();
    c.bench_function("frame_at/enneper", |b| b.iter(|| frame_at(imm.as_ref(), black_box(&[0.3, -0.2])).unwrap().h_normal()));
}

fn bench_spectrum(c: &mut Criterion) {
    let space = HyperHermitianSpace::new(2).unwrap();
    c.bench_function("omega_delta_spectrum/n2", |b| b.iter(|| omega_delta_spectrum(black_box(&space))));
}

criterion_group!(benches, bench_comass, bench_cheeger, bench_frame, bench_spectrum);
criterion_main!(benches);
