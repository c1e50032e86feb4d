use super::GeneratorSpec;
use crate::error::{Error, Result};
use crate::likelihood::QuadratureConfig;
use crate::starlike::Method;

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// Stop each spread once `max(1, round(ratio * n))` nodes are infected.
    FixedN(Vec<f64>),
    /// Stop each spread at the given horizon.
    FixedT(Vec<f64>),
}

impl Mode {
    pub fn settings(&self) -> &[f64] {
        match self {
            Mode::FixedN(v) | Mode::FixedT(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub mode: Mode,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    pub quadrature: QuadratureConfig,
    /// Source redraws allowed per trial in fixed-N mode before giving up.
    /// Random generators also draw a fresh graph with each new source.
    pub max_resamples: usize,
}

impl ExperimentConfig {
    pub fn new(generator: GeneratorSpec, mode: Mode) -> Self {
        ExperimentConfig {
            generator,
            mode,
            trials: 100,
            methods: vec![Method::Starlike, Method::RcBfs, Method::Jordan, Method::Distance],
            master_seed: 0,
            quadrature: QuadratureConfig::default(),
            max_resamples: 1000,
        }
    }

    /// Parses a flat `key = value` file. Blank lines and `#` comments are
    /// ignored. Keys: `generator`, `mode` (`fixed_n` or `fixed_t`),
    /// `settings` (comma-separated ratios or horizons), `trials`, `methods`
    /// (comma-separated), `seed`, `abs_tol`, `rel_tol`, `max_subdivisions`,
    /// `max_resamples`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        Self::from_pairs(pairs)
    }

    /// Builds a config from key/value pairs; later pairs win.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut generator = None;
        let mut mode = None;
        let mut settings = None;
        let mut rest = Vec::new();
        for (k, v) in pairs {
            match k.as_str() {
                "generator" => generator = Some(v.parse::<GeneratorSpec>()?),
                "mode" => mode = Some(v),
                "settings" => settings = Some(parse_list::<f64>(&k, &v)?),
                _ => rest.push((k, v)),
            }
        }
        let generator = generator.ok_or_else(|| Error::invalid("config is missing `generator`"))?;
        let settings = settings.ok_or_else(|| Error::invalid("config is missing `settings`"))?;
        let mode = match mode.as_deref() {
            Some("fixed_n") | None => Mode::FixedN(settings),
            Some("fixed_t") => Mode::FixedT(settings),
            Some(other) => return Err(Error::invalid(format!("unknown mode {other:?}"))),
        };
        let mut cfg = ExperimentConfig::new(generator, mode);
        for (k, v) in rest {
            cfg.set(&k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides one scalar key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::invalid(format!("bad value {value:?} for `{key}`"));
        match key {
            "trials" => self.trials = value.parse().map_err(|_| bad())?,
            "methods" => self.methods = parse_list(key, value)?,
            "seed" => self.master_seed = value.parse().map_err(|_| bad())?,
            "abs_tol" => self.quadrature.abs_tol = value.parse().map_err(|_| bad())?,
            "rel_tol" => self.quadrature.rel_tol = value.parse().map_err(|_| bad())?,
            "max_subdivisions" => self.quadrature.max_subdivisions = value.parse().map_err(|_| bad())?,
            "max_resamples" => self.max_resamples = value.parse().map_err(|_| bad())?,
            "generator" => self.generator = value.parse()?,
            "settings" => {
                let v = parse_list(key, value)?;
                self.mode = match self.mode {
                    Mode::FixedN(_) => Mode::FixedN(v),
                    Mode::FixedT(_) => Mode::FixedT(v),
                };
            }
            "mode" => {
                let v = self.mode.settings().to_vec();
                self.mode = match value {
                    "fixed_n" => Mode::FixedN(v),
                    "fixed_t" => Mode::FixedT(v),
                    _ => return Err(bad()),
                };
            }
            _ => return Err(Error::invalid(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("at least one method is required"));
        }
        match &self.mode {
            Mode::FixedN(r) if r.is_empty() || r.iter().any(|&x| !(x > 0.0 && x <= 1.0)) => {
                return Err(Error::invalid("infection ratios must lie in (0, 1]"));
            }
            Mode::FixedT(t) if t.is_empty() || t.iter().any(|&x| !(x > 0.0 && x.is_finite())) => {
                return Err(Error::invalid("horizons must be positive"));
            }
            _ => {}
        }
        let non_tree = matches!(self.generator, GeneratorSpec::Er { .. } | GeneratorSpec::Grid { .. });
        if non_tree && self.methods.contains(&Method::MpTree) {
            return Err(Error::invalid(format!(
                "mp-tree needs tree snapshots; generator {} can produce cycles",
                self.generator
            )));
        }
        Ok(())
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::invalid(format!("bad entry {s:?} in `{key}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# ER sweep
generator = er:50:0.04
mode = fixed_n
settings = 0.1, 0.5
trials = 300
methods = starlike,rc-bfs,jordan,distance
seed = 42
";

    #[test]
    fn parses_and_overrides() {
        let mut cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.mode, Mode::FixedN(vec![0.1, 0.5]));
        assert_eq!(cfg.trials, 300);
        assert_eq!(cfg.methods.len(), 4);
        assert_eq!(cfg.master_seed, 42);
        cfg.set("trials", "7").unwrap();
        cfg.set("mode", "fixed_t").unwrap();
        assert_eq!(cfg.mode, Mode::FixedT(vec![0.1, 0.5]));
        assert_eq!(cfg.trials, 7);
        assert!(cfg.set("colour", "red").is_err());
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(ExperimentConfig::parse("generator = line:5\nsettings = 1.5").is_err());
        assert!(ExperimentConfig::parse("generator = line:5\nsettings = 0.5\ntrials = 0").is_err());
        assert!(ExperimentConfig::parse("settings = 0.5").is_err());
        assert!(ExperimentConfig::parse("generator = er:10:0.5\nsettings = 0.5\nmethods = mp-tree").is_err());
        assert!(ExperimentConfig::parse("generator = line:10\nsettings = 0.5\nmethods = mp-tree").is_ok());
        assert!(matches!(
            ExperimentConfig::parse("generator line:5"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
