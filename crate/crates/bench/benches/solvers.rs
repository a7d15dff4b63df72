use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use smgshield_core::game::{Coalition, Direction, StochasticGame};
use smgshield_core::generators::{gen_virus, gen_warehouse, VirusParams, WarehouseParams};
use smgshield_core::model::{build_game, parse_model, BuildOptions};
use smgshield_core::shields::{synthesize_pre_safety, Threshold};
use smgshield_core::solver::{
    solve_bounded_safety, solve_mean_payoff, solve_reachability, SolverParams,
};

fn build(text: &str) -> StochasticGame {
    build_game(&parse_model(text).unwrap(), &BuildOptions::default()).unwrap()
}

fn virus_game(m: usize, n: usize) -> StochasticGame {
    build(&gen_virus(&VirusParams { m, n, a: 0.5, c: 0.2 }).unwrap())
}

fn warehouse_game(n: usize) -> StochasticGame {
    build(&gen_warehouse(&WarehouseParams { n, ..Default::default() }).unwrap())
}

fn bench_model_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for (m, n) in [(2, 2), (3, 2), (3, 3)] {
        let text = gen_virus(&VirusParams { m, n, a: 0.5, c: 0.2 }).unwrap();
        group.bench_with_input(BenchmarkId::new("virus", m * n), &text, |b, text| {
            b.iter(|| build(text));
        });
    }
    group.finish();
}

fn bench_bounded_safety(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounded_safety");
    for n in [2usize, 3, 4] {
        let game = warehouse_game(n);
        let coalition = Coalition::new([0]);
        let safe: Vec<bool> = game
            .states
            .iter()
            .map(|s| !s.labels.contains("crash"))
            .collect();
        group.bench_with_input(
            BenchmarkId::new("warehouse", game.num_states()),
            &game,
            |b, game| {
                b.iter(|| solve_bounded_safety(game, &coalition, &safe, 14).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_reachability(c: &mut Criterion) {
    let mut group = c.benchmark_group("reachability");
    let params = SolverParams::default();
    for n in [2usize, 3, 4] {
        let game = warehouse_game(n);
        let coalition = Coalition::new([0]);
        let target: Vec<bool> = game
            .states
            .iter()
            .map(|s| s.labels.contains("crash"))
            .collect();
        group.bench_with_input(
            BenchmarkId::new("warehouse", game.num_states()),
            &game,
            |b, game| {
                b.iter(|| {
                    solve_reachability(game, &coalition, &target, Direction::Min, &params)
                        .unwrap()
                });
            },
        );
    }
    group.finish();
}

fn bench_mean_payoff(c: &mut Criterion) {
    let mut group = c.benchmark_group("mean_payoff");
    group.sample_size(10);
    let params = SolverParams::default();
    for (m, n) in [(2, 2), (3, 2)] {
        let game = virus_game(m, n);
        let coalition = Coalition::new([1]);
        let reward = &game.reward_structures["infections"];
        group.bench_with_input(
            BenchmarkId::new("virus", game.num_states()),
            &game,
            |b, game| {
                b.iter(|| {
                    solve_mean_payoff(game, &coalition, reward, Direction::Min, &params).unwrap()
                });
            },
        );
    }
    group.finish();
}

fn bench_shield_synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("shield");
    for n in [2usize, 3] {
        let game = warehouse_game(n);
        let coalition = Coalition::new([0]);
        let safe: Vec<bool> = game
            .states
            .iter()
            .map(|s| !s.labels.contains("crash"))
            .collect();
        let solved = solve_bounded_safety(&game, &coalition, &safe, 14).unwrap();
        group.bench_with_input(
            BenchmarkId::new("pre_safety", game.num_states()),
            &game,
            |b, game| {
                b.iter(|| {
                    let shield = synthesize_pre_safety(
                        game,
                        &coalition,
                        &solved,
                        Threshold::Absolute { gamma: 0.8 },
                    )
                    .unwrap();
                    shield.render(game)
                });
            },
        );
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_model_build,
    bench_bounded_safety,
    bench_reachability,
    bench_mean_payoff,
    bench_shield_synthesis
);
criterion_main!(benches);
