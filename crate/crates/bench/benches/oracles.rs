use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use risfda::oracle::{enumerate_u_moments, monte_carlo_eve_snr, PathSynth};
use risfda::FdaPlan;
use risfda_bench::{aligned_eve, range_cut_scenario};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_u");
    for m in [8usize, 12, 16] {
        let plan = FdaPlan::new(60e9, 1e6, m).unwrap();
        let scn = range_cut_scenario();
        let (bob, eve) = (scn.bob(), aligned_eve(&scn));
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| enumerate_u_moments(&plan, &bob, &eve, m / 2 + 1).unwrap())
        });
    }
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let scn = range_cut_scenario();
    let synth = PathSynth::new(&scn, &aligned_eve(&scn)).unwrap();
    let excluded: Vec<usize> = (0..147).map(|i| 3 * i).collect();
    let mut out = Vec::new();
    c.bench_function("path_synth_channel", |b| {
        b.iter(|| synth.channel(&excluded, &mut out))
    });
}

fn monte_carlo(c: &mut Criterion) {
    let scn = range_cut_scenario();
    let eve = aligned_eve(&scn);
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("eve_snr_1e4", |b| {
        b.iter(|| monte_carlo_eve_snr(&scn, &eve, 10_000, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, enumeration, synthesis, monte_carlo);
criterion_main!(benches);
