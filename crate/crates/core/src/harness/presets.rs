//! Named experiment configurations mirroring the standard reconstruction
//! scenarios. Each preset is plain configuration text.

use super::config::{parse_config, ExperimentConfig};
use crate::error::{Error, Result};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "upm-n1",
        description: "pointwise unipolar, one profile, rectangle, exact data, level set",
        toml: r#"[measurement]
kind = "pointwise_unipolar"
count = 1

[engine]
name = "levelset"
max_iter = 500

[output]
dir = "dopinv-out/upm-n1"
"#,
    },
    Preset {
        name: "upm-n1-noisy",
        description: "pointwise unipolar, one profile, rectangle, 10% noise, level set",
        toml: r#"[measurement]
kind = "pointwise_unipolar"
count = 1
noise = 0.1
seed = 1

[engine]
name = "levelset"
max_iter = 1000

[output]
dir = "dopinv-out/upm-n1-noisy"
"#,
    },
    Preset {
        name: "upm-osc-n1",
        description: "pointwise unipolar, one profile, oscillating junction, 1% noise, level set",
        toml: r#"[phantom]
kind = "oscillating_junction"

[measurement]
kind = "pointwise_unipolar"
count = 1
noise = 0.01
seed = 1

[engine]
name = "levelset"
max_iter = 1000

[output]
dir = "dopinv-out/upm-osc-n1"
"#,
    },
    Preset {
        name: "ucfm-n1",
        description: "total current, one contact window, oscillating junction, 1% noise, level set",
        toml: r#"[phantom]
kind = "oscillating_junction"

[measurement]
kind = "averaged_unipolar"
count = 1
noise = 0.01
seed = 1

[engine]
name = "levelset"
max_iter = 1000

[output]
dir = "dopinv-out/ucfm-n1"
"#,
    },
    Preset {
        name: "ucfm-n3",
        description:
            "total current, three contact windows, oscillating junction, 1% noise, level set",
        toml: r#"[phantom]
kind = "oscillating_junction"

[measurement]
kind = "averaged_unipolar"
count = 3
noise = 0.01
seed = 1

[engine]
name = "levelset"
max_iter = 1000

[output]
dir = "dopinv-out/ucfm-n3"
"#,
    },
    Preset {
        name: "ucfm-n25",
        description: "total current, 25 contact windows, oscillating junction, 1% noise, level set",
        toml: r#"[phantom]
kind = "oscillating_junction"

[measurement]
kind = "averaged_unipolar"
count = 25
noise = 0.01
seed = 1

[engine]
name = "levelset"
max_iter = 1000

[output]
dir = "dopinv-out/ucfm-n25"
"#,
    },
    Preset {
        name: "bpm-n1",
        description: "pointwise bipolar, one profile, rectangle, exact data, level set",
        toml: r#"[measurement]
kind = "pointwise_bipolar"
count = 1

[engine]
name = "levelset"
max_iter = 1000

[output]
dir = "dopinv-out/bpm-n1"
"#,
    },
    Preset {
        name: "lw-upm-n1",
        description: "pointwise unipolar, one profile, rectangle, 1% noise, Landweber",
        toml: r#"[measurement]
kind = "pointwise_unipolar"
count = 1
noise = 0.01
seed = 1

[engine]
name = "landweber"
max_iter = 500

[output]
dir = "dopinv-out/lw-upm-n1"
"#,
    },
    Preset {
        name: "lk-ucfm-n3",
        description:
            "total current, three contact windows, rectangle, 1% noise, Landweber-Kaczmarz",
        toml: r#"[measurement]
kind = "averaged_unipolar"
count = 3
noise = 0.01
seed = 1

[engine]
name = "kaczmarz"
max_iter = 300

[output]
dir = "dopinv-out/lk-ucfm-n3"
"#,
    },
];

/// Parsed configuration of a named preset.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let p = PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        Error::Config(format!(
            "unknown preset \"{name}\" (available: {})",
            names.join(", ")
        ))
    })?;
    parse_config(p.toml)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::MeasurementKind;

    #[test]
    fn every_preset_parses() {
        for p in PRESETS {
            preset(p.name).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn figure_presets_have_expected_shapes() {
        let c = preset("ucfm-n3").unwrap();
        assert_eq!((c.kind, c.count), (MeasurementKind::AveragedUnipolar, 3));
        let b = preset("bpm-n1").unwrap();
        assert_eq!((b.kind, b.count), (MeasurementKind::PointwiseBipolar, 1));
        assert!(preset("nope").is_err());
    }
}
