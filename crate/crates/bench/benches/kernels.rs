//! Hot-path benchmarks: coefficient generation, line apply/solve sweeps,
//! and one full D-ADI step at benchmark-table scale.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fracadi_core::adi::{step_d_adi_2d, SteppingState};
use fracadi_core::frac::{apply_operator, build_direction_operator, coefficients, solve_lines};
use fracadi_core::model::{AxisSpec, Field, FracOrder};

fn axis(n: usize, mu: f64, kappa: f64) -> AxisSpec {
    AxisSpec::constant(0.0, 1.0, n, FracOrder::new(mu).unwrap(), 1.0, 1.0, kappa).unwrap()
}

fn wavy_field(extents: &[usize]) -> Field {
    let mut f = Field::zeros(extents);
    for (k, v) in f.values_mut().iter_mut().enumerate() {
        *v = ((k % 97) as f64 * 0.13).sin();
    }
    f
}

fn bench_coefficients(c: &mut Criterion) {
    let mut g = c.benchmark_group("coefficients");
    for count in [320usize, 3200] {
        g.bench_with_input(BenchmarkId::from_parameter(count), &count, |b, &count| {
            b.iter(|| coefficients(1.5, count));
        });
    }
    g.finish();
}

fn bench_line_sweeps(c: &mut Criterion) {
    let n = 160;
    let op = build_direction_operator(&axis(n, 1.5, 1.0), 0, 1.0 / n as f64).unwrap();
    let field = wavy_field(&[n - 1, n - 1]);
    let mut g = c.benchmark_group("sweeps-2d-159x159");
    g.bench_function("apply", |b| {
        b.iter(|| apply_operator(&op, &field).unwrap());
    });
    g.bench_function("solve", |b| {
        b.iter(|| solve_lines(&op, &field).unwrap());
    });
    g.finish();
}

fn bench_d_adi_step(c: &mut Criterion) {
    let n = 100;
    let tau = 1.0 / n as f64;
    let ops = vec![
        build_direction_operator(&axis(n, 1.9, 0.0), 0, tau).unwrap(),
        build_direction_operator(&axis(n, 1.9, 0.0), 1, tau).unwrap(),
    ];
    let u = wavy_field(&[n - 1, n - 1]);
    let f = wavy_field(&[n - 1, n - 1]);
    let state = SteppingState::new(ops, u);
    c.bench_function("d-adi-2d-step-99x99", |b| {
        b.iter(|| step_d_adi_2d(&state, &f).unwrap());
    });
}

criterion_group!(
    benches,
    bench_coefficients,
    bench_line_sweeps,
    bench_d_adi_step
);
criterion_main!(benches);
