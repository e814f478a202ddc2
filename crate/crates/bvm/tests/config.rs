use bvm::config::{parse_config, Arithmetic, ConfigError};
use bvm_core::spectrum::SetKind;

const BASE: &str = r#"
[diagram]
levels = 2
incidence = [[[2, 1], [3, 1]]]

[schedule]
kind = "explicit"
values = ["3/10", 0.5, "7/10"]
tail = "cycle"
"#;

fn keys(err: &ConfigError) -> Vec<String> {
    err.fields().iter().map(|f| f.key.clone()).collect()
}

#[test]
fn minimal_config_is_valid() {
    let cfg = parse_config(BASE).unwrap();
    assert_eq!(cfg.arithmetic, Arithmetic::Float);
    let ps = cfg.schedule().unwrap();
    assert_eq!(ps.p_f64(4), 0.3);
    assert_eq!(cfg.simulate.steps, 1000);
    assert_eq!(cfg.spectrum.set, SetKind::E);
}

#[test]
fn null_probability_names_the_index() {
    let text = BASE.replace(r#"["3/10", 0.5, "7/10"]"#, r#"["3/10", 0, "7/10"]"#);
    let err = parse_config(&text).unwrap_err();
    assert_eq!(keys(&err), ["schedule.values[1]"]);
    assert!(err.to_string().contains("nonnull"), "{}", err);
}

#[test]
fn probability_above_one_is_rejected() {
    let text = BASE.replace("\"7/10\"", "\"7/5\"");
    let err = parse_config(&text).unwrap_err();
    assert_eq!(keys(&err), ["schedule.values[2]"]);
}

#[test]
fn repeated_rank_in_ordering_is_rejected() {
    let text = BASE.replace(
        "incidence = [[[2, 1], [3, 1]]]",
        "incidence = [[[2, 1], [3, 1]]]\nordering = [[[1, 1], [1, 2]]]",
    );
    let err = parse_config(&text).unwrap_err();
    assert_eq!(keys(&err), ["diagram.ordering[0][0]"]);
    assert!(err.to_string().contains("permutation"), "{}", err);
}

#[test]
fn unknown_key_is_rejected() {
    let text = BASE.replace("levels = 2", "levels = 2\ncolour = 3");
    let err = parse_config(&text).unwrap_err();
    assert!(matches!(err, ConfigError::Syntax(_)));
    assert!(err.to_string().contains("colour"), "{}", err);
}

#[test]
fn non_simple_diagram_is_rejected() {
    let text = BASE.replace("[[[2, 1], [3, 1]]]", "[[[2, 0], [0, 2]]]");
    let err = parse_config(&text).unwrap_err();
    assert_eq!(keys(&err), ["diagram.incidence"]);
    assert!(err.to_string().contains("not simple"), "{}", err);
}

#[test]
fn every_field_error_is_reported() {
    let text =
        BASE.replace("0.5", "-1") + "\n[simulate]\nreplicas = 0\n\n[spectrum]\nset = \"G\"\n";
    let err = parse_config(&text).unwrap_err();
    let mut k = keys(&err);
    k.sort();
    assert_eq!(
        k,
        ["schedule.values[1]", "simulate.replicas", "spectrum.set"]
    );
}

#[test]
fn rational_mode_and_grid() {
    let text = format!(
        "arithmetic = \"rational\"\n{}\n[spectrum]\nset = \"pt\"\nbudget = 32\ngrid = {{ re = [-1.0, 1.0], im = [-0.5, 0.5], width = 8, height = 4 }}\n",
        BASE
    );
    let cfg = parse_config(&text).unwrap();
    assert_eq!(cfg.arithmetic, Arithmetic::Rational);
    assert_eq!(cfg.spectrum.set, SetKind::Pt);
    assert_eq!(cfg.spectrum.budget, Some(32));
    assert_eq!(
        (cfg.spectrum.grid.width, cfg.spectrum.grid.im_max),
        (8, 0.5)
    );
}

#[test]
fn degenerate_grid_is_rejected() {
    let text = format!(
        "{}\n[spectrum]\ngrid = {{ re = [1.0, -1.0], im = [-1.0, 1.0], width = 8, height = 8 }}\n",
        BASE
    );
    assert_eq!(keys(&parse_config(&text).unwrap_err()), ["spectrum.grid"]);
}

#[test]
fn non_stationary_levels() {
    let text = BASE.replace(
        "levels = 2\nincidence = [[[2, 1], [3, 1]]]",
        "levels = [2, 2, 2]\nstationary = false\nincidence = [[[1, 1], [1, 1]], [[2, 1], [3, 1]]]",
    );
    let cfg = parse_config(&text).unwrap();
    assert!(!cfg.diagram().is_stationary());
    assert_eq!(cfg.diagram().coefficients_2x2(5), Some([2, 1, 3, 1]));
}
