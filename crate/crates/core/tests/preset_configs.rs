//! The annotated files under `configs/` must describe exactly the built-in
//! presets. Regenerate them with `SCHELLING_BLESS=1 cargo test --test preset_configs`.

use std::path::PathBuf;

use schelling::harness::{preset, PRESET_NAMES};
use schelling::io::config::{preset_description, to_annotated_toml, RunConfigFile};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

#[test]
fn preset_files_match_presets() {
    let bless = std::env::var_os("SCHELLING_BLESS").is_some();
    for name in PRESET_NAMES {
        let spec = preset(name).unwrap();
        let expected = to_annotated_toml(&spec, &preset_description(name));
        let path = config_path(name);
        if bless {
            std::fs::write(&path, &expected).unwrap();
        }
        let text =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, expected, "{} is stale", path.display());
        let parsed = RunConfigFile::parse(&text).unwrap().to_spec(name).unwrap();
        assert_eq!(parsed, spec, "{name}");
    }
}

#[test]
fn no_stray_config_files() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        assert!(
            PRESET_NAMES.contains(&stem.as_str()),
            "unexpected {}",
            path.display()
        );
    }
}
