use std::path::Path;

use robust_ts::agents::Robustness;
use robust_ts::attacks::AttackStrategy;
use robust_ts::harness::output::{write_round_log, write_sweep};
use robust_ts::harness::{
    run_episode, run_replicated, run_sweep, AgentSpec, ConfigFile, ExperimentConfig,
};

const BASE: &str = r#"
setting = "stochastic"
horizon = 400
repetitions = 4
master_seed = 5
[env]
means = [0.9, 0.8, 0.7, 0.6, 0.5]
[attack]
corruption_level = 10.0
strategy = "oracle"
margin = 2.0
[[agents]]
kind = "ts"
[[agents]]
kind = "robust_ts"
[[agents]]
kind = "ucb"
[sweep]
corruption_levels = [0.0, 10.0]
"#;

const LINEAR: &str = r#"
setting = "linear"
horizon = 300
repetitions = 3
master_seed = 8
[env]
dim = 4
arms = 6
noise_sigma = 0.1
contexts = "fresh_unit_ball"
[attack]
corruption_level = 20.0
strategy = "garcelon_style"
target = 2
noise_sigma = 1.0
[[agents]]
kind = "lin_ts"
[[agents]]
kind = "robust_lin_ts"
robustness = "unknown"
[[agents]]
kind = "lin_ucb"
[[agents]]
kind = "cw_oful"
"#;

fn experiments(text: &str) -> Vec<ExperimentConfig> {
    ConfigFile::from_toml_str(text, Path::new("t.toml"))
        .unwrap()
        .experiments()
        .unwrap()
}

#[test]
fn episode_accounting_holds_for_every_agent() {
    for cfg in experiments(BASE).into_iter().chain(experiments(LINEAR)) {
        for run in 0..cfg.repetitions as u64 {
            let ep = run_episode(&cfg, run, true).unwrap();
            assert_eq!(ep.cum_regret.len(), cfg.horizon);
            assert!(ep.cum_regret.windows(2).all(|w| w[1] >= w[0]));
            let total: f64 = ep.rounds.iter().map(|r| r.regret_inc).sum();
            assert!((total - ep.final_regret()).abs() < 1e-9);
            let spent: f64 = ep.rounds.iter().map(|r| r.corruption.abs()).sum();
            assert!(ep.budget_spent <= cfg.attack.corruption_level + 1e-9);
            assert!((spent - ep.budget_spent).abs() < 1e-9);
            let target = cfg.attack.target.unwrap();
            for r in &ep.rounds {
                assert_eq!(r.reward_post, r.reward_pre + r.corruption);
                if r.arm == target {
                    assert_eq!(r.corruption, 0.0);
                }
            }
        }
    }
}

#[test]
fn environment_draws_do_not_depend_on_the_agent() {
    let exps = experiments(BASE);
    let mut a = exps[0].clone();
    a.attack.strategy = AttackStrategy::None;
    let ucb = a.with_agent(AgentSpec::Ucb { exploration: 1.0 });
    let ea = run_episode(&a, 0, true).unwrap();
    let eb = run_episode(&ucb, 0, true).unwrap();
    // One uniform per round whatever the arm, so equal arms see equal rewards.
    for (ra, rb) in ea.rounds.iter().zip(&eb.rounds) {
        if ra.arm == rb.arm {
            assert_eq!(ra.reward_pre, rb.reward_pre);
        }
    }
}

#[test]
fn single_repetition_has_zero_spread() {
    let mut cfg = experiments(BASE)[0].clone();
    cfg.repetitions = 1;
    let rep = run_replicated(&cfg, false).unwrap();
    assert!(rep.aggregate.std.iter().all(|&s| s == 0.0));
    assert_eq!(rep.aggregate.mean, rep.episodes[0].cum_regret);
}

#[test]
fn replication_is_independent_of_thread_count() {
    let cfg = experiments(LINEAR)[1].clone();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_replicated(&cfg, false).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_replicated(&cfg, false).unwrap());
    assert_eq!(serial, parallel);
    let indices: Vec<u64> = serial.episodes.iter().map(|e| e.run_index).collect();
    assert_eq!(indices, vec![0, 1, 2]);
}

#[test]
fn single_cell_sweep_matches_replicated_run() {
    let file = ConfigFile::from_toml_str(BASE, Path::new("t.toml")).unwrap();
    let mut sweep = file.sweep().unwrap();
    sweep.agents = vec![AgentSpec::Ts];
    sweep.corruption_levels = vec![0.0];
    let rows = run_sweep(&sweep).unwrap();
    assert_eq!(rows.len(), 1);
    let rep = run_replicated(&sweep.base.with_corruption_level(0.0), false).unwrap();
    assert_eq!(rows[0].mean_final_regret, rep.aggregate.final_mean());
    assert_eq!(rows[0].std_final_regret, rep.aggregate.final_std());
}

#[test]
fn sweep_cells_pass_the_level_to_known_agents_only() {
    let known = AgentSpec::RobustTs {
        robustness: Robustness::Known,
    };
    let unknown = AgentSpec::RobustTs {
        robustness: Robustness::Unknown,
    };
    let file = ConfigFile::from_toml_str(BASE, Path::new("t.toml")).unwrap();
    let mut sweep = file.sweep().unwrap();
    sweep.agents = vec![known, unknown];
    sweep.corruption_levels = vec![0.0, 30.0];
    let rows = run_sweep(&sweep).unwrap();

    // Known: the bonus follows the cell's level, so it equals an explicit value.
    for (row, level) in rows[..2].iter().zip([0.0, 30.0]) {
        let explicit = sweep
            .base
            .with_agent(AgentSpec::RobustTs {
                robustness: Robustness::Value(level),
            })
            .with_corruption_level(level);
        let rep = run_replicated(&explicit, false).unwrap();
        assert_eq!(row.mean_final_regret, rep.aggregate.final_mean());
    }
    // Unknown: one bonus for every cell.
    let c_bar = (400.0 * 5f64.ln() / 5.0).sqrt();
    for (row, level) in rows[2..].iter().zip([0.0, 30.0]) {
        let explicit = sweep
            .base
            .with_agent(AgentSpec::RobustTs {
                robustness: Robustness::Value(c_bar),
            })
            .with_corruption_level(level);
        let rep = run_replicated(&explicit, false).unwrap();
        assert_eq!(row.mean_final_regret, rep.aggregate.final_mean());
    }
}

#[test]
fn no_attack_ts_regret_is_small() {
    // 10 runs of the five-arm Bernoulli problem, T = 5000, no attack.
    let text = BASE
        .replace("horizon = 400", "horizon = 5000")
        .replace("repetitions = 4", "repetitions = 10")
        .replace(
            "corruption_level = 10.0\nstrategy = \"oracle\"\nmargin = 2.0",
            "corruption_level = 0.0\nstrategy = \"none\"",
        );
    let cfg = experiments(&text)[0].clone();
    assert_eq!(cfg.attack.strategy, AttackStrategy::None);
    let rep = run_replicated(&cfg, false).unwrap();
    let envelope = (5.0 * 5000.0 * 5f64.ln()).sqrt();
    assert!(
        rep.aggregate.final_mean() < 250.0,
        "mean final regret {} (sqrt(NT ln N) = {envelope:.1})",
        rep.aggregate.final_mean()
    );
}

#[test]
fn csv_writers_handle_empty_input() {
    let tmp = tempfile::tempdir().unwrap();
    let rounds = tmp.path().join("nested/rounds.csv");
    write_round_log(&rounds, &[]).unwrap();
    assert_eq!(
        std::fs::read_to_string(&rounds).unwrap(),
        "t,arm,reward_pre,corruption,reward_post,cum_regret,budget_spent\n"
    );
    let sweep = tmp.path().join("sweep.csv");
    write_sweep(&sweep, &[]).unwrap();
    assert_eq!(
        std::fs::read_to_string(&sweep).unwrap(),
        "agent,corruption_level,mean_final_regret,std_final_regret\n"
    );
}

#[test]
fn diagnostics_count_rounds_after_the_first() {
    let text = LINEAR.replace("master_seed = 8", "master_seed = 8\ndiagnostics = true");
    let exps = experiments(&text);
    let ts = run_episode(&exps[1], 0, false).unwrap();
    let d = ts.diagnostics.unwrap();
    assert_eq!(d.rounds_checked, 299);
    // Optimistic agents draw no sample, so nothing is checked.
    let ucb = run_episode(&exps[2], 0, false).unwrap();
    assert_eq!(ucb.diagnostics.unwrap().rounds_checked, 0);
}
