use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::InitialProfile;
use crate::error::{Error, Result};
use crate::field::CorrelationParams;
use crate::game::EnergyModel;
use crate::radio::ChannelParams;
use crate::topology::SinkLayout;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    /// Seconds per slot.
    pub slot_duration: f64,
    /// Joules per slot for every sensor; `None` means `tx_power * slot_duration`.
    pub per_sensor_energy: Option<f64>,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            slot_duration: 1e-3,
            per_sensor_energy: None,
        }
    }
}

/// One experiment point. Defaults are the reference parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub side_length: f64,
    pub m: usize,
    pub r: f64,
    pub p_e: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub channel: ChannelParams,
    pub correlation: CorrelationParams,
    pub energy: EnergyConfig,
    pub sink_layout: SinkLayout,
    pub initial_profile: InitialProfile,
    pub max_passes: usize,
    pub energy_weight: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            side_length: 100.0,
            m: 1000,
            r: 2.0,
            p_e: 0.1,
            runs: 1000,
            master_seed: 1,
            channel: ChannelParams::default(),
            correlation: CorrelationParams::default(),
            energy: EnergyConfig::default(),
            sink_layout: SinkLayout::Center,
            initial_profile: InitialProfile::AllTransmit,
            max_passes: 50,
            energy_weight: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_e) {
            return Err(Error::InvalidConfig(format!("p_e must lie in [0, 1], got {}", self.p_e)));
        }
        if !(self.side_length > 0.0 && self.side_length.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "side_length must be positive, got {}",
                self.side_length
            )));
        }
        if !(self.r >= 0.0) {
            return Err(Error::InvalidConfig(format!("r must be >= 0, got {}", self.r)));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidConfig("max_passes must be at least 1".into()));
        }
        if !(self.energy_weight >= 0.0 && self.energy_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "energy_weight must be >= 0, got {}",
                self.energy_weight
            )));
        }
        self.channel.validate()?;
        self.correlation.validate()?;
        self.energy_model(1).map(|_| ())
    }

    pub fn energy_model(&self, m: usize) -> Result<EnergyModel> {
        match self.energy.per_sensor_energy {
            Some(e) => EnergyModel::new(vec![e; m], self.energy.slot_duration),
            None => EnergyModel::uniform(m, self.channel.tx_power, self.energy.slot_duration),
        }
    }

    /// Applies `key=value`, where `key` is a dotted field path such as
    /// `channel.path_loss_exp`. The value is read as JSON, falling back to a
    /// plain string.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("override {assignment:?} is not key=value"))
        })?;
        let value: Value =
            serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().into()));
        let mut tree = serde_json::to_value(&*self).expect("config serializes");
        let mut node = &mut tree;
        let parts: Vec<&str> = key.trim().split('.').collect();
        for (depth, part) in parts.iter().enumerate() {
            let obj = node.as_object_mut().ok_or_else(|| {
                Error::InvalidConfig(format!("{key}: {} is not a section", parts[..depth].join(".")))
            })?;
            if !obj.contains_key(*part) {
                return Err(Error::InvalidConfig(format!("unknown config key {key:?}")));
            }
            node = obj.get_mut(*part).expect("checked");
        }
        *node = value;
        *self = serde_json::from_value(tree)
            .map_err(|e| Error::InvalidConfig(format!("{key}: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let c = ExperimentConfig::default();
        assert_eq!((c.side_length, c.r, c.runs), (100.0, 2.0, 1000));
        assert_eq!(c.channel.bandwidth, 20e6);
        assert_eq!(c.channel.tx_power, 0.1);
        assert_eq!((c.correlation.beta, c.correlation.lambda), (1.0, 1.0));
        let e = c.energy_model(3).unwrap();
        assert!((e.e[0] - 1e-4).abs() < 1e-18);
        c.validate().unwrap();
    }

    #[test]
    fn overrides() {
        let mut c = ExperimentConfig::default();
        c.set("m=250").unwrap();
        c.set("channel.path_loss_exp=2.5").unwrap();
        c.set("sink_layout=grid:3").unwrap();
        c.set("initial_profile=random").unwrap();
        c.set("energy.per_sensor_energy=0.5").unwrap();
        assert_eq!(c.m, 250);
        assert_eq!(c.channel.path_loss_exp, 2.5);
        assert_eq!(c.sink_layout, SinkLayout::Grid(3));
        assert_eq!(c.initial_profile, InitialProfile::Random);
        assert_eq!(c.energy.per_sensor_energy, Some(0.5));

        assert!(c.set("nonsense=1").is_err());
        assert!(c.set("channel.nope=1").is_err());
        assert!(c.set("m=lots").is_err());
        assert!(c.set("m").is_err());
        assert!(c.set("sink_layout=grid:0").is_err());
    }

    #[test]
    fn validation() {
        for bad in ["p_e=1.5", "runs=0", "m=0", "max_passes=0", "r=-1", "energy_weight=-2"] {
            let mut c = ExperimentConfig::default();
            c.set(bad).unwrap();
            assert!(c.validate().is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"m": 40, "channel": {"path_loss_exp": 4}}"#).unwrap();
        assert_eq!(c.m, 40);
        assert_eq!(c.channel.path_loss_exp, 4.0);
        assert_eq!(c.channel.bandwidth, 20e6);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"mm": 40}"#).is_err());
    }
}
