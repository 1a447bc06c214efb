use std::fs;

use tempfile::tempdir;
use twinsgame::bundle::{format_observations, parse_observations, BUNDLE_FORMAT, MANIFEST_FILE};
use twinsgame::report::read_results_csv;
use twinsgame::runner::bundle_dir;
use twinsgame::{parse_config, run_to_dir, Bundle, BundleError, ConfigError};
use twinsgame_core::game::{generate_observations, sample_vendor_game};
use twinsgame_core::rng::stream;
use twinsgame_core::{Game, GameConfig, Method};

const SMALL_VENDOR: &str = r#"
k = 2
observations = 6
trials = 2
restarts = 3
iterations = 20
seed = 99

[game]
family = "vendor"
n_agents = 12
n_types = 2
n_locations = 2
sigma2 = 1.5
"#;

fn vendor_bundle() -> Bundle {
    let game = sample_vendor_game(9, 2, 3, 1.5, &mut stream(1, &[0])).unwrap();
    let obs = generate_observations(&game, 7, &mut stream(1, &[1])).unwrap();
    Bundle { game: Some(Game::Vendor(game)), observations: Some(obs), ..Bundle::default() }
}

#[test]
fn bundle_round_trips_bit_for_bit() {
    let dir = tempdir().unwrap();
    let bundle = vendor_bundle();
    bundle.save(dir.path()).unwrap();
    let loaded = Bundle::load(dir.path()).unwrap();
    assert_eq!(loaded, bundle);
}

#[test]
fn observation_text_round_trips() {
    let obs = vendor_bundle().observations.unwrap();
    let text = format_observations(&obs);
    assert_eq!(parse_observations(&text).unwrap(), obs);
    let commented = format!("# generated\n\n{text}");
    assert_eq!(parse_observations(&commented).unwrap(), obs);
}

#[test]
fn malformed_observation_lines_report_their_line_number() {
    let header = "twinsgame-observations/1 agents=2 strategies=2 kind=vendor";
    let cases = [
        (format!("{header}\n0 1 | 1.0 2.0\n0 1 1.0 2.0\n"), 3),
        (format!("{header}\n0 2 | 1.0 2.0\n"), 2),
        (format!("# c\n{header}\n0 | 1.0\n"), 3),
        (format!("{header}\n0 1 | 1.0 x\n"), 2),
        (format!("{header}\n0 1 | 1.0 NaN\n"), 2),
    ];
    for (text, line) in cases {
        match parse_observations(&text) {
            Err(BundleError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("expected parse error for {text:?}, got {other:?}"),
        }
    }
}

#[test]
fn unknown_observation_format_is_a_version_error() {
    let err = parse_observations("twinsgame-observations/9 agents=1 strategies=2 kind=vendor\n").unwrap_err();
    assert!(matches!(err, BundleError::Version { .. }), "{err}");
}

#[test]
fn unknown_bundle_format_is_a_version_error() {
    let dir = tempdir().unwrap();
    vendor_bundle().save(dir.path()).unwrap();
    let path = dir.path().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).unwrap().replace(BUNDLE_FORMAT, "twinsgame-bundle/2");
    fs::write(&path, text).unwrap();
    assert!(matches!(Bundle::load(dir.path()), Err(BundleError::Version { .. })));
}

#[test]
fn inconsistent_bundles_are_rejected() {
    let mut bundle = vendor_bundle();
    let other = sample_vendor_game(4, 2, 2, 1.0, &mut stream(2, &[0])).unwrap();
    bundle.game = Some(Game::Vendor(other));
    let dir = tempdir().unwrap();
    assert!(matches!(bundle.save(dir.path()), Err(BundleError::Invalid(_))));
}

#[test]
fn overrides_replace_nested_values() {
    let overrides = vec!["trials=5".to_string(), "game.sigma2=0.5".to_string(), "methods=[\"ALL\", \"WEL-2\"]".to_string()];
    let config = parse_config(SMALL_VENDOR, &overrides).unwrap();
    assert_eq!(config.trials, 5);
    assert_eq!(config.methods, vec![Method::All, Method::Wel(2)]);
    match config.game {
        GameConfig::Vendor { sigma2, .. } => assert_eq!(sigma2, 0.5),
        other => panic!("unexpected game {other:?}"),
    }
}

#[test]
fn bad_configs_are_rejected() {
    let unknown = format!("{SMALL_VENDOR}\n[extra]\nx = 1\n");
    assert!(matches!(parse_config(&unknown, &[]), Err(ConfigError::Invalid(_))));
    let typo = SMALL_VENDOR.replace("restarts", "restart");
    assert!(matches!(parse_config(&typo, &[]), Err(ConfigError::Invalid(_))));
    assert!(matches!(parse_config(SMALL_VENDOR, &["k=0".into()]), Err(ConfigError::Invalid(_))));
    assert!(matches!(parse_config(SMALL_VENDOR, &["noequals".into()]), Err(ConfigError::Override(_))));
    assert!(matches!(parse_config("k = [", &[]), Err(ConfigError::Syntax(_))));
}

#[test]
fn experiment_directory_round_trips() {
    let config = parse_config(SMALL_VENDOR, &[]).unwrap();
    let dir = tempdir().unwrap();
    let table = run_to_dir(&config, dir.path(), |_| {}).unwrap();

    let rows = read_results_csv(fs::File::open(dir.path().join("results.csv")).unwrap()).unwrap();
    assert_eq!(rows, table.rows);
    assert_eq!(rows.len(), 2 * config.methods.len());
    assert!(dir.path().join("summary.csv").exists());
    assert!(!dir.path().join("plot.tsv").exists());

    for trial in 0..2 {
        let bundle = Bundle::load(&bundle_dir(dir.path(), 0, trial)).unwrap();
        assert_eq!(bundle.meta.trial, Some(trial));
        assert_eq!(bundle.meta.config.as_ref(), Some(&config));
        assert!(bundle.game.is_some() && bundle.observations.is_some());
        assert_eq!(bundle.evaluations.len(), config.methods.len());
    }
}
