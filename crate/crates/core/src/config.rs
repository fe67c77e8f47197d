//! Run configuration: plain `key=value` files plus programmatic overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dbs::DbsConfig;
use crate::error::{Error, Result};
use crate::postproc::PostprocConfig;
use crate::snn::{Kernel, SnnParams};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kernel: Kernel,
    pub lanes: usize,
    pub snn: SnnParams,
    pub dbs: DbsConfig,
    pub post: PostprocConfig,
    pub out_dir: PathBuf,
    pub bench: bool,
    pub seed: u64,
    /// Keep membrane potentials across frames instead of resetting them.
    pub persist_vm: bool,
    dbs_seed_explicit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kernel: Kernel::V1,
            lanes: 16,
            snn: SnnParams::default(),
            dbs: DbsConfig::default(),
            post: PostprocConfig::default(),
            out_dir: PathBuf::from("out"),
            bench: false,
            seed: 0,
            persist_vm: false,
            dbs_seed_explicit: false,
        }
    }
}

impl RunConfig {
    /// Set the run seed. The background model inherits it unless `dbs.seed`
    /// was set explicitly.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if !self.dbs_seed_explicit {
            self.dbs.seed = seed;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lanes == 0 || !self.lanes.is_power_of_two() {
            return Err(Error::BadLaneCount(self.lanes));
        }
        self.snn.validate()?;
        self.dbs.validate()?;
        self.post.validate()
    }

    /// Apply one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::invalid_config(key, format!("cannot parse `{value}`")))
        }

        match key {
            "dbs.samples" => self.dbs.samples_per_pixel = parse(key, value)?,
            "dbs.radius" => self.dbs.match_radius = parse(key, value)?,
            "dbs.min_matches" => self.dbs.min_matches = parse(key, value)?,
            "dbs.replace_rate" => self.dbs.replace_rate = parse(key, value)?,
            "dbs.neighbor_rate" => self.dbs.neighbor_rate = parse(key, value)?,
            "dbs.seed" => {
                self.dbs.seed = parse(key, value)?;
                self.dbs_seed_explicit = true;
            }
            "snn.r_m" => self.snn.r_m = parse(key, value)?,
            "snn.tau_m" => self.snn.tau_m = parse(key, value)?,
            "snn.dt" => self.snn.dt = parse(key, value)?,
            "snn.steps" => self.snn.steps = parse(key, value)?,
            "snn.p2c" => self.snn.p2c = parse(key, value)?,
            "snn.s2c" => self.snn.s2c = parse(key, value)?,
            "snn.v_rest" => self.snn.v_rest = parse(key, value)?,
            "snn.v_thresh" => self.snn.v_thresh = parse(key, value)?,
            "snn.v_reset" => self.snn.v_reset = parse(key, value)?,
            "snn.lanes" => self.lanes = parse(key, value)?,
            "snn.kernel" => self.kernel = value.parse()?,
            "snn.persist_vm" => self.persist_vm = parse(key, value)?,
            "post.spike_threshold" => self.post.spike_threshold = parse(key, value)?,
            "post.filter_size" => self.post.filter_size = parse(key, value)?,
            "post.refire_threshold" => self.post.refire_threshold = parse(key, value)?,
            other => {
                return Err(Error::invalid_config(other, "unknown configuration key"));
            }
        }
        Ok(())
    }

    /// Apply a config file: one `key=value` per line, `#` comments and blank
    /// lines ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid_config(
                    &format!("{}:{}", path.display(), lineno + 1),
                    "expected key=value",
                )
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn set_covers_every_key() {
        let mut cfg = RunConfig::default();
        for (key, value) in [
            ("dbs.samples", "10"),
            ("dbs.radius", "15"),
            ("dbs.min_matches", "3"),
            ("dbs.replace_rate", "0.125"),
            ("dbs.neighbor_rate", "0.25"),
            ("dbs.seed", "99"),
            ("snn.r_m", "2.0"),
            ("snn.tau_m", "5.0"),
            ("snn.dt", "0.5"),
            ("snn.steps", "20"),
            ("snn.p2c", "0.04"),
            ("snn.s2c", "0.5"),
            ("snn.v_rest", "0.0"),
            ("snn.v_thresh", "1.5"),
            ("snn.v_reset", "0.1"),
            ("snn.lanes", "8"),
            ("snn.kernel", "v2"),
            ("snn.persist_vm", "true"),
            ("post.spike_threshold", "2"),
            ("post.filter_size", "5"),
            ("post.refire_threshold", "100"),
        ] {
            cfg.set(key, value).unwrap();
        }
        assert_eq!(cfg.kernel, Kernel::V2);
        assert_eq!(cfg.lanes, 8);
        assert_eq!(cfg.dbs.seed, 99);
        assert!(cfg.persist_vm);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("snn.gamma", "1").is_err());
        assert!(cfg.set("snn.steps", "ten").is_err());
    }

    #[test]
    fn run_seed_feeds_dbs_unless_overridden() {
        let mut cfg = RunConfig::default();
        cfg.set_seed(5);
        assert_eq!(cfg.dbs.seed, 5);

        cfg.set("dbs.seed", "11").unwrap();
        cfg.set_seed(6);
        assert_eq!(cfg.seed, 6);
        assert_eq!(cfg.dbs.seed, 11);
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# pipeline settings\nsnn.kernel = v2\nsnn.lanes=4\n\ndbs.radius=25 # wider\n",
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.kernel, Kernel::V2);
        assert_eq!(cfg.lanes, 4);
        assert_eq!(cfg.dbs.match_radius, 25);

        std::fs::write(&path, "snn.lanes\n").unwrap();
        assert!(cfg.apply_file(&path).is_err());
    }
}
