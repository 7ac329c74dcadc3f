use binloc_core::builder::build_deterministic;
use binloc_core::generator::{generate, GenerationProfile};
use binloc_core::instance::ScenarioConfig;
use binloc_core::moo::{epsilon_constraint, payoff_table, Strategy};
use binloc_core::robust::transform;
use binloc_core::solver::{solve, SolveConfig};
use std::time::Instant;

#[test]
fn probe_soyster() {
    for n in [3, 4] {
        let inst = generate(18, n, &GenerationProfile::named("i16").unwrap()).unwrap();
        let (model, idx) = build_deterministic(&inst).unwrap();
        let config = SolveConfig::internal();
        let scenario = ScenarioConfig::new(0.4, 1.0);
        let (rob, _) = transform(&model, &idx, &inst, &scenario, false).unwrap();
        let t = Instant::now();
        match solve(&rob, 0, &config) {
            Ok(r) => println!(
                "soyster n={n}: {:?} obj {:?} nodes {} in {:.3}s",
                r.status, r.objective, r.nodes, t.elapsed().as_secs_f64()
            ),
            Err(e) => println!("soyster n={n} FAILED {:.3}s: {e}", t.elapsed().as_secs_f64()),
        }
    }
}

#[test]
fn probe_grid() {
    let inst = generate(18, 3, &GenerationProfile::named("i16").unwrap()).unwrap();
    let (model, idx) = build_deterministic(&inst).unwrap();
    let config = SolveConfig::internal();
    let t = Instant::now();
    let table = payoff_table(&model, &idx, &inst, Strategy::Lws, &config).unwrap();
    println!(
        "payoff n=3: cost [{}, {}] freq [{}, {}] in {:.3}s",
        table.best_cost, table.cost_at_best_freq, table.freq_at_best_cost, table.best_freq,
        t.elapsed().as_secs_f64()
    );
    let t = Instant::now();
    let scenario = ScenarioConfig::deterministic();
    let set = epsilon_constraint(&model, &idx, &inst, &table, &scenario, 10, &config).unwrap();
    println!(
        "grid n=3: {} solutions from {} runs in {:.3}s",
        set.solutions.len(),
        set.runs_solved,
        t.elapsed().as_secs_f64()
    );
    for p in &set.solutions {
        println!("  ({}, {})", p.cost, p.frequency);
    }
}
