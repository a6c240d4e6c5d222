//! Ready-made configs, one per headline claim. `run <name>` falls back to
//! these when the argument is not an existing file.

pub static PRESETS: &[(&str, &str)] = &[
    ("relaxation-frac", include_str!("../../../presets/relaxation-frac.json")),
    ("bounds-suite", include_str!("../../../presets/bounds-suite.json")),
    ("bounds-properties", include_str!("../../../presets/bounds-properties.json")),
    ("frac-l2-d1", include_str!("../../../presets/frac-l2-d1.json")),
    ("frac-l2-d2", include_str!("../../../presets/frac-l2-d2.json")),
    ("frac-l2-d3", include_str!("../../../presets/frac-l2-d3.json")),
    ("frac-l2-d5", include_str!("../../../presets/frac-l2-d5.json")),
    ("frac-weakl2-d4", include_str!("../../../presets/frac-weakl2-d4.json")),
    ("frac-gradl2-d1", include_str!("../../../presets/frac-gradl2-d1.json")),
    ("frac-gradl2-d3", include_str!("../../../presets/frac-gradl2-d3.json")),
    ("frac-lower-d2", include_str!("../../../presets/frac-lower-d2.json")),
    ("frac-lower-d5", include_str!("../../../presets/frac-lower-d5.json")),
    ("ultraslow-l2-d1", include_str!("../../../presets/ultraslow-l2-d1.json")),
    ("ultraslow-l2-d5", include_str!("../../../presets/ultraslow-l2-d5.json")),
    ("switched-l2-d2", include_str!("../../../presets/switched-l2-d2.json")),
    ("switched-l2-d5", include_str!("../../../presets/switched-l2-d5.json")),
    ("fracsum-l2-d2", include_str!("../../../presets/fracsum-l2-d2.json")),
    ("z-lp-d3", include_str!("../../../presets/z-lp-d3.json")),
    ("z-lp-divergent-d4", include_str!("../../../presets/z-lp-divergent-d4.json")),
    ("z-weaklp-d3-a03", include_str!("../../../presets/z-weaklp-d3-a03.json")),
    ("z-weaklp-d3-a07", include_str!("../../../presets/z-weaklp-d3-a07.json")),
    ("z-mass-frac-d4", include_str!("../../../presets/z-mass-frac-d4.json")),
    ("z-mass-ultraslow-d2", include_str!("../../../presets/z-mass-ultraslow-d2.json")),
    ("kochubei-d3", include_str!("../../../presets/kochubei-d3.json")),
    ("energy-a05-d2", include_str!("../../../presets/energy-a05-d2.json")),
    ("energy-a03-d4", include_str!("../../../presets/energy-a03-d4.json")),
    ("profile-d1-p1", include_str!("../../../presets/profile-d1-p1.json")),
    ("profile-d1-p15", include_str!("../../../presets/profile-d1-p15.json")),
];

pub fn find(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn all_presets_parse_strictly() {
        for (name, text) in PRESETS {
            let cfg: ExperimentConfig = serde_json::from_str(text)
                .unwrap_or_else(|e| panic!("preset {name}: {e}"));
            assert_eq!(&cfg.name, name, "preset file name must match its claim name");
        }
    }
}
