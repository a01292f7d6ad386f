//! Simulation configuration: materials, drive and the mapping of mesh
//! physical tags onto conductor/dielectric volumes and boundary pieces.
//!
//! The on-disk form is TOML:
//!
//! ```toml
//! [drive]
//! frequency_hz = 50.0
//! terminals = [{ magnitude = 100.0, phase = 0.0 }]   # I_1 .. I_{N-1}, peak amperes
//! # or, for three terminals:
//! # balanced = { amplitude = 3116.79, base_phase = 0.0 }
//!
//! [materials.1]            # key is the volume physical tag
//! sigma = 1.0e6            # S/m
//! mu = 1.25663706212e-6    # H/m
//!
//! [regions]
//! conductor_tags = [1]
//! dielectric_tags = []
//! heater_tags = [1]
//!
//! [regions.boundary]
//! outer = [10]
//! terminal_1 = 11          # a tag or a list of tags
//! terminal_2 = 12          # the last terminal is the ground
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::phasor::{balanced_drive, Phasor};

/// Vacuum permeability (H/m).
pub const MU_0: f64 = 4.0e-7 * PI;

pub type Tag = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Electric conductivity, S/m.
    pub sigma: f64,
    /// Magnetic permeability, H/m.
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaterialTable {
    entries: BTreeMap<Tag, Material>,
}

impl MaterialTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tag: Tag, material: Material) -> Result<()> {
        let key = format!("materials.{tag}");
        if !(material.sigma >= 0.0) || !material.sigma.is_finite() {
            return Err(Error::config(
                format!("{key}.sigma"),
                format!("conductivity must be finite and >= 0, got {}", material.sigma),
            ));
        }
        if !(material.mu > 0.0) || !material.mu.is_finite() {
            return Err(Error::config(
                format!("{key}.mu"),
                format!("permeability must be finite and > 0, got {}", material.mu),
            ));
        }
        self.entries.insert(tag, material);
        Ok(())
    }

    pub fn get(&self, tag: Tag) -> Option<&Material> {
        self.entries.get(&tag)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Tag, &Material)> {
        self.entries.iter().map(|(t, m)| (*t, m))
    }
}

/// Prescribed terminal currents at a single frequency. Terminal `N` (the
/// last one) is the ground and carries no prescribed current.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    frequency_hz: f64,
    terminal_currents: Vec<Phasor>,
}

impl DriveSpec {
    pub fn new(frequency_hz: f64, terminal_currents: Vec<Phasor>) -> Result<Self> {
        if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
            return Err(Error::config(
                "drive.frequency_hz",
                format!("must be > 0, got {frequency_hz}"),
            ));
        }
        if terminal_currents.is_empty() {
            return Err(Error::config(
                "drive.terminals",
                "at least one driven terminal is required (N >= 2)",
            ));
        }
        Ok(Self {
            frequency_hz,
            terminal_currents,
        })
    }

    /// Three-terminal balanced drive; `I_3` is implied by the ground.
    pub fn balanced(frequency_hz: f64, amplitude: f64, base_phase: f64) -> Result<Self> {
        let [i1, i2, _] = balanced_drive(amplitude, base_phase)?;
        Self::new(frequency_hz, vec![i1, i2])
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency_hz
    }

    /// Currents entering terminals `1..N-1`.
    pub fn terminal_currents(&self) -> &[Phasor] {
        &self.terminal_currents
    }

    /// Total number of terminals including the ground.
    pub fn n_terminals(&self) -> usize {
        self.terminal_currents.len() + 1
    }

    /// Same drive with every current multiplied by `factor`.
    pub fn scaled(&self, factor: num_complex::Complex64) -> Self {
        Self {
            frequency_hz: self.frequency_hz,
            terminal_currents: self.terminal_currents.iter().map(|c| Phasor(c.0 * factor)).collect(),
        }
    }
}

/// Role of every physical tag of the mesh.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegionMap {
    pub conductor_tags: BTreeSet<Tag>,
    pub dielectric_tags: BTreeSet<Tag>,
    pub heater_tags: BTreeSet<Tag>,
    pub outer_tags: BTreeSet<Tag>,
    /// Surface tags of terminal `k` at index `k-1`; the last entry is the ground.
    pub terminal_tags: Vec<BTreeSet<Tag>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeRole {
    Conductor,
    Dielectric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceRole {
    Outer,
    /// Zero-based terminal index.
    Terminal(usize),
}

impl RegionMap {
    pub fn n_terminals(&self) -> usize {
        self.terminal_tags.len()
    }

    pub fn volume_role(&self, tag: Tag) -> Option<VolumeRole> {
        if self.conductor_tags.contains(&tag) {
            Some(VolumeRole::Conductor)
        } else if self.dielectric_tags.contains(&tag) {
            Some(VolumeRole::Dielectric)
        } else {
            None
        }
    }

    pub fn surface_role(&self, tag: Tag) -> Option<SurfaceRole> {
        if self.outer_tags.contains(&tag) {
            return Some(SurfaceRole::Outer);
        }
        self.terminal_tags
            .iter()
            .position(|tags| tags.contains(&tag))
            .map(SurfaceRole::Terminal)
    }

    /// Checks the tag sets for overlaps.
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.conductor_tags.intersection(&self.dielectric_tags).next() {
            return Err(Error::config(
                "regions.dielectric_tags",
                format!("tag {t} is also declared as a conductor"),
            ));
        }
        if let Some(t) = self.heater_tags.difference(&self.conductor_tags).next() {
            return Err(Error::config(
                "regions.heater_tags",
                format!("heater tag {t} is not a conductor tag"),
            ));
        }
        if self.terminal_tags.len() < 2 {
            return Err(Error::config(
                "regions.boundary",
                format!(
                    "at least two terminals are required, found {}",
                    self.terminal_tags.len()
                ),
            ));
        }
        let mut seen: BTreeMap<Tag, String> = self.outer_tags.iter().map(|t| (*t, "outer".to_string())).collect();
        for (k, tags) in self.terminal_tags.iter().enumerate() {
            let name = format!("terminal_{}", k + 1);
            if tags.is_empty() {
                return Err(Error::config(
                    format!("regions.boundary.{name}"),
                    "no surface tag given",
                ));
            }
            for t in tags {
                if let Some(prev) = seen.insert(*t, name.clone()) {
                    return Err(Error::config(
                        format!("regions.boundary.{name}"),
                        format!("surface tag {t} is already used by `{prev}`"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub materials: MaterialTable,
    pub drive: DriveSpec,
    pub regions: RegionMap,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    drive: RawDrive,
    materials: BTreeMap<String, RawMaterial>,
    regions: RawRegions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    frequency_hz: f64,
    terminals: Option<Vec<RawPolar>>,
    balanced: Option<RawBalanced>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolar {
    magnitude: f64,
    phase: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBalanced {
    amplitude: f64,
    #[serde(default)]
    base_phase: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    sigma: Option<f64>,
    mu: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegions {
    conductor_tags: Vec<Tag>,
    #[serde(default)]
    dielectric_tags: Vec<Tag>,
    #[serde(default)]
    heater_tags: Vec<Tag>,
    boundary: BTreeMap<String, OneOrMany>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Tag),
    Many(Vec<Tag>),
}

impl OneOrMany {
    fn into_set(self) -> BTreeSet<Tag> {
        match self {
            OneOrMany::One(t) => BTreeSet::from([t]),
            OneOrMany::Many(v) => v.into_iter().collect(),
        }
    }
}

/// Parses and validates a TOML configuration document.
pub fn load_config(text: &str) -> Result<Config> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let key = e
            .span()
            .map(|s| format!("byte {}..{}", s.start, s.end))
            .unwrap_or_else(|| "document".to_string());
        Error::config(key, e.message().to_string())
    })?;

    let regions = convert_regions(raw.regions)?;

    let mut materials = MaterialTable::new();
    for (key, m) in raw.materials {
        let tag: Tag = key
            .parse()
            .map_err(|_| Error::config(format!("materials.{key}"), "key must be a physical tag number"))?;
        if regions.volume_role(tag).is_none() {
            return Err(Error::config(
                format!("materials.{key}"),
                "material given for a tag that is neither a conductor nor a dielectric region",
            ));
        }
        let sigma = m
            .sigma
            .ok_or_else(|| Error::config(format!("materials.{key}.sigma"), "missing"))?;
        let mu =
            m.mu.ok_or_else(|| Error::config(format!("materials.{key}.mu"), "missing"))?;
        materials.insert(tag, Material { sigma, mu })?;
    }
    for tag in regions.conductor_tags.iter().chain(&regions.dielectric_tags) {
        let Some(m) = materials.get(*tag) else {
            return Err(Error::config(
                format!("materials.{tag}"),
                "declared region has no material (sigma, mu)",
            ));
        };
        match regions.volume_role(*tag) {
            Some(VolumeRole::Conductor) if !(m.sigma > 0.0) => {
                return Err(Error::config(
                    format!("materials.{tag}.sigma"),
                    "conductor regions need sigma > 0",
                ))
            }
            Some(VolumeRole::Dielectric) if m.sigma != 0.0 => {
                return Err(Error::config(
                    format!("materials.{tag}.sigma"),
                    "dielectric regions need sigma = 0",
                ))
            }
            _ => {}
        }
    }

    let drive = match (raw.drive.terminals, raw.drive.balanced) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "drive",
                "give either `terminals` or `balanced`, not both",
            ))
        }
        (None, None) => {
            return Err(Error::config("drive.terminals", "missing"));
        }
        (Some(list), None) => {
            let currents = list
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    Phasor::from_polar(p.magnitude, p.phase)
                        .map_err(|e| Error::config(format!("drive.terminals[{k}]"), e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            DriveSpec::new(raw.drive.frequency_hz, currents)?
        }
        (None, Some(b)) => {
            if regions.n_terminals() != 3 {
                return Err(Error::config(
                    "drive.balanced",
                    format!(
                        "balanced drive needs exactly 3 terminals, regions declare {}",
                        regions.n_terminals()
                    ),
                ));
            }
            DriveSpec::balanced(raw.drive.frequency_hz, b.amplitude, b.base_phase)
                .map_err(|e| Error::config("drive.balanced", e.to_string()))?
        }
    };
    if drive.n_terminals() != regions.n_terminals() {
        return Err(Error::config(
            "drive.terminals",
            format!(
                "{} driven terminal currents given but regions declare {} terminals (expected {})",
                drive.terminal_currents().len(),
                regions.n_terminals(),
                regions.n_terminals().saturating_sub(1)
            ),
        ));
    }

    Ok(Config {
        materials,
        drive,
        regions,
    })
}

fn convert_regions(raw: RawRegions) -> Result<RegionMap> {
    let mut outer = BTreeSet::new();
    let mut terminals: BTreeMap<usize, BTreeSet<Tag>> = BTreeMap::new();
    for (key, tags) in raw.boundary {
        if key == "outer" {
            outer = tags.into_set();
        } else if let Some(k) = key
            .strip_prefix("terminal_")
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|k| *k >= 1)
        {
            terminals.insert(k, tags.into_set());
        } else {
            return Err(Error::config(
                format!("regions.boundary.{key}"),
                "unknown key (expected `outer` or `terminal_<k>`)",
            ));
        }
    }
    for (expected, k) in (1..).zip(terminals.keys()) {
        if *k != expected {
            return Err(Error::config(
                format!("regions.boundary.terminal_{expected}"),
                "terminal keys must be numbered 1..N without gaps",
            ));
        }
    }
    let map = RegionMap {
        conductor_tags: raw.conductor_tags.into_iter().collect(),
        dielectric_tags: raw.dielectric_tags.into_iter().collect(),
        heater_tags: raw.heater_tags.into_iter().collect(),
        outer_tags: outer,
        terminal_tags: terminals.into_values().collect(),
    };
    map.validate()?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasor::PHASE_SHIFT_120;

    const MINIMAL: &str = r#"
[drive]
frequency_hz = 50
terminals = [{ magnitude = 100.0, phase = 0.0 }]

[materials.1]
sigma = 1e6
mu = 1.25663706212e-6

[regions]
conductor_tags = [1]

[regions.boundary]
outer = [10]
terminal_1 = 11
terminal_2 = [12]
"#;

    #[test]
    fn minimal_config() {
        let cfg = load_config(MINIMAL).unwrap();
        assert_eq!(cfg.drive.n_terminals(), 2);
        assert_eq!(cfg.drive.frequency_hz(), 50.0);
        assert_eq!(cfg.drive.terminal_currents()[0], Phasor::new(100.0, 0.0));
        assert_eq!(cfg.regions.surface_role(12), Some(SurfaceRole::Terminal(1)));
        assert_eq!(cfg.regions.surface_role(10), Some(SurfaceRole::Outer));
        assert_eq!(cfg.materials.get(1).unwrap().sigma, 1e6);
    }

    #[test]
    fn negative_sigma_names_region() {
        let text = MINIMAL.replace("sigma = 1e6", "sigma = -1");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("materials.1.sigma"), "{err}");
    }

    #[test]
    fn nonpositive_frequency() {
        let text = MINIMAL.replace("frequency_hz = 50", "frequency_hz = 0");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("drive.frequency_hz"), "{err}");
    }

    #[test]
    fn missing_material_and_unknown_keys() {
        let text = MINIMAL.replace("conductor_tags = [1]", "conductor_tags = [1, 2]");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("materials.2"), "{err}");

        let text = MINIMAL.replace("mu = 1.25663706212e-6", "mu = 1.25663706212e-6\ncolor = 3");
        assert!(load_config(&text).is_err());

        let text = MINIMAL.replace("outer = [10]", "outer = [10]\nterminal_x = 4");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("terminal_x"), "{err}");
    }

    #[test]
    fn sigma_on_dielectric_rejected() {
        let text = MINIMAL.replace(
            "[regions]\nconductor_tags = [1]",
            "[materials.2]\nsigma = 5.0\nmu = 1e-6\n\n[regions]\nconductor_tags = [1]\ndielectric_tags = [2]",
        );
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("materials.2.sigma"), "{err}");
    }

    #[test]
    fn balanced_three_terminal() {
        let text = r#"
[drive]
frequency_hz = 50
balanced = { amplitude = 3116.79 }

[materials.1]
sigma = 1e6
mu = 1.25663706212e-6

[regions]
conductor_tags = [1]
heater_tags = [1]

[regions.boundary]
outer = [10]
terminal_1 = 11
terminal_2 = 12
terminal_3 = 13
"#;
        let cfg = load_config(text).unwrap();
        let i = cfg.drive.terminal_currents();
        assert_eq!(cfg.drive.n_terminals(), 3);
        let expected = i[0].rotate(PHASE_SHIFT_120);
        assert!((i[1] - expected).magnitude() < 1e-12 * 3116.79);
        assert!((i[0].magnitude() - 3116.79).abs() < 1e-9);
    }

    #[test]
    fn overlapping_terminal_tags() {
        let text = MINIMAL.replace("terminal_2 = [12]", "terminal_2 = [12, 11]");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("terminal_2"), "{err}");
    }

    #[test]
    fn deterministic() {
        assert_eq!(load_config(MINIMAL).unwrap(), load_config(MINIMAL).unwrap());
    }
}
