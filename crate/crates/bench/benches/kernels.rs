use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gevrey_flow::dynamics::{BilinearOperator, Integrator, IntegratorConfig, SimState};
use gevrey_flow::spectral::{convolve_direct, ConvolutionPath, FastConvolver, Lattice};
use gevrey_flow::stochastic::BrownianPath;
use gevrey_flow_bench::{repulsive, smooth_field};
use std::hint::black_box;

fn convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolution");
    for (d, k) in [(1, 64), (2, 16)] {
        let lattice = Lattice::new(d, k).unwrap();
        let f = smooth_field(lattice);
        let fast = FastConvolver::new(lattice);
        let label = format!("d{d}_k{k}");
        group.bench_function(BenchmarkId::new("direct", &label), |b| b.iter(|| convolve_direct(black_box(&f), &f).unwrap()));
        group.bench_function(BenchmarkId::new("fast", &label), |b| b.iter(|| fast.convolve(black_box(&f), &f, false).unwrap()));
    }
    group.finish();
}

fn bilinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("bilinear");
    group.sample_size(20);
    for (d, k) in [(1, 32), (2, 8), (2, 16)] {
        let lattice = Lattice::new(d, k).unwrap();
        let op = BilinearOperator::new(lattice, &repulsive(d)).unwrap();
        let f = smooth_field(lattice);
        let label = format!("d{d}_k{k}");
        for (name, path) in [("direct", ConvolutionPath::Direct), ("fast", ConvolutionPath::Fast { dealias: false })] {
            group.bench_function(BenchmarkId::new(name, &label), |b| {
                b.iter(|| op.apply(black_box(&f), &f, 0.3, path, 300.0).unwrap())
            });
        }
    }
    group.finish();
}

fn etd_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("etd_step");
    for (d, k) in [(1, 32), (2, 8)] {
        let lattice = Lattice::new(d, k).unwrap();
        let cfg = repulsive(d);
        let path = BrownianPath::sample(0.01, 1e-3, 1).unwrap();
        let integrator = Integrator::new(lattice, &cfg, &IntegratorConfig::with_dt(1e-3)).unwrap();
        let state = SimState::new(0.0, smooth_field(lattice).scaled(0.01), &path, &cfg).unwrap();
        group.bench_function(BenchmarkId::new("exp_heun", format!("d{d}_k{k}")), |b| {
            b.iter(|| integrator.step(black_box(&state), &path).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, convolution, bilinear, etd_step);
criterion_main!(benches);
