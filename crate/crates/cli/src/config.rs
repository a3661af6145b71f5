//! Flat `key = value` run configuration. Command-line flags override file
//! values, which override the built-in defaults.

use std::path::{Path, PathBuf};

use serde::Serialize;

use divlab_core::SweepConfig;

pub const KEYS: [&str; 15] = [
    "gamma0", "lambda", "tau", "t_min", "t_max", "dt", "family_min", "family_max", "family_n",
    "grid_theta", "grid_phi", "grid_r", "tol", "out_dir", "seed",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub sweep: SweepConfig,
    pub out_dir: PathBuf,
    /// Recorded for provenance; every computation is deterministic.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sweep: SweepConfig::default(),
            out_dir: PathBuf::from("divlab-out"),
            seed: 0,
        }
    }
}

/// Optional overrides, one per key.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub gamma0: Option<f64>,
    pub lambda: Option<f64>,
    pub tau: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub family: Option<FamilySpec>,
    pub grid_theta: Option<usize>,
    pub grid_phi: Option<usize>,
    pub grid_r: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// Parses `min:max:n`.
pub fn parse_family(s: &str) -> Result<FamilySpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, n] = parts[..] else {
        return Err(format!("family must be min:max:n, got {s:?}"));
    };
    Ok(FamilySpec {
        min: parse_num(min, "family min")?,
        max: parse_num(max, "family max")?,
        n: parse_num(n, "family n")?,
    })
}

fn parse_num<T: std::str::FromStr>(v: &str, key: &str) -> Result<T, String> {
    v.trim()
        .parse()
        .map_err(|_| format!("{key}: cannot parse {v:?}"))
}

impl Overrides {
    /// Reads a config file. Blank lines and `#` comments are ignored;
    /// unknown or repeated keys are errors.
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut o = Self::default();
        let mut seen = Vec::new();
        let (mut fmin, mut fmax, mut fn_) = (None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key=value, got {line:?}", i + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key {key:?}", i + 1));
            }
            if seen.contains(&key) {
                return Err(format!("line {}: duplicate key {key:?}", i + 1));
            }
            seen.push(key);
            let at = |e: String| format!("line {}: {e}", i + 1);
            match key {
                "gamma0" => o.gamma0 = Some(parse_num(value, key).map_err(at)?),
                "lambda" => o.lambda = Some(parse_num(value, key).map_err(at)?),
                "tau" => o.tau = Some(parse_num(value, key).map_err(at)?),
                "t_min" => o.t_min = Some(parse_num(value, key).map_err(at)?),
                "t_max" => o.t_max = Some(parse_num(value, key).map_err(at)?),
                "dt" => o.dt = Some(parse_num(value, key).map_err(at)?),
                "family_min" => fmin = Some(parse_num(value, key).map_err(at)?),
                "family_max" => fmax = Some(parse_num(value, key).map_err(at)?),
                "family_n" => fn_ = Some(parse_num(value, key).map_err(at)?),
                "grid_theta" => o.grid_theta = Some(parse_num(value, key).map_err(at)?),
                "grid_phi" => o.grid_phi = Some(parse_num(value, key).map_err(at)?),
                "grid_r" => o.grid_r = Some(parse_num(value, key).map_err(at)?),
                "tol" => o.tol = Some(parse_num(value, key).map_err(at)?),
                "out_dir" => o.out_dir = Some(PathBuf::from(value)),
                "seed" => o.seed = Some(parse_num(value, key).map_err(at)?),
                _ => unreachable!("key list checked above"),
            }
        }
        if fmin.is_some() || fmax.is_some() || fn_.is_some() {
            let d = RunConfig::default().sweep;
            o.family = Some(FamilySpec {
                min: fmin.unwrap_or(d.family_min),
                max: fmax.unwrap_or(d.family_max),
                n: fn_.unwrap_or(d.opt.gamma0_grid),
            });
        }
        Ok(o)
    }

    /// Values set in `self` win over those in `base`.
    pub fn or(self, base: Self) -> Self {
        Self {
            gamma0: self.gamma0.or(base.gamma0),
            lambda: self.lambda.or(base.lambda),
            tau: self.tau.or(base.tau),
            t_min: self.t_min.or(base.t_min),
            t_max: self.t_max.or(base.t_max),
            dt: self.dt.or(base.dt),
            family: self.family.or(base.family),
            grid_theta: self.grid_theta.or(base.grid_theta),
            grid_phi: self.grid_phi.or(base.grid_phi),
            grid_r: self.grid_r.or(base.grid_r),
            tol: self.tol.or(base.tol),
            out_dir: self.out_dir.or(base.out_dir),
            seed: self.seed.or(base.seed),
        }
    }

    /// Applies the overrides to the defaults and validates the result.
    pub fn resolve(self) -> Result<RunConfig, String> {
        let mut c = RunConfig::default();
        let s = &mut c.sweep;
        if let Some(v) = self.gamma0 {
            s.gamma0 = v;
        }
        if let Some(v) = self.lambda {
            s.lambda = v;
        }
        // The free family shares the target's coupling width.
        s.family_lambda = s.lambda;
        if let Some(v) = self.tau {
            s.tau = v;
        }
        if let Some(v) = self.t_min {
            s.t_min = v;
        }
        if let Some(v) = self.t_max {
            s.t_max = v;
        }
        if let Some(v) = self.dt {
            s.dt = v;
        }
        if let Some(f) = self.family {
            s.family_min = f.min;
            s.family_max = f.max;
            s.opt.gamma0_grid = f.n;
        }
        if let Some(v) = self.grid_theta {
            s.opt.grid_theta = v;
        }
        if let Some(v) = self.grid_phi {
            s.opt.grid_phi = v;
        }
        if let Some(v) = self.grid_r {
            s.opt.grid_r = v;
        }
        if let Some(v) = self.tol {
            s.opt.tol = v;
        }
        if let Some(v) = self.out_dir {
            c.out_dir = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.sweep.validate().map_err(|e| e.to_string())?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_key() {
        let text = "\
# comment
gamma0 = 1.5
lambda=2
tau = 0.02
t_min = 0.5
t_max = 1
dt = 0.1
family_min = 0.1
family_max = 0.9
family_n = 9
grid_theta = 6
grid_phi = 4
grid_r = 3
tol = 1e-5
out_dir = runs/a   # trailing comment
seed = 7
";
        let c = Overrides::parse(text).unwrap().resolve().unwrap();
        assert_eq!(c.sweep.gamma0, 1.5);
        assert_eq!(c.sweep.tau, 0.02);
        assert_eq!((c.sweep.family_min, c.sweep.family_max), (0.1, 0.9));
        assert_eq!(c.sweep.opt.gamma0_grid, 9);
        assert_eq!(c.sweep.opt.grid_r, 3);
        assert_eq!(c.out_dir, PathBuf::from("runs/a"));
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = Overrides::parse("tau = 0.02\ndt = 0.5\n").unwrap();
        let flags = Overrides {
            dt: Some(0.25),
            ..Overrides::default()
        };
        let c = flags.or(file).resolve().unwrap();
        assert_eq!(c.sweep.dt, 0.25);
        assert_eq!(c.sweep.tau, 0.02);
        assert_eq!(c.sweep.t_max, 5.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Overrides::parse("bogus = 1").is_err());
        assert!(Overrides::parse("tau = 1\ntau = 2").is_err());
        assert!(Overrides::parse("tau 1").is_err());
        assert!(Overrides::parse("tau = fast").is_err());
        let bad_family = Overrides::parse("family_max = 1.5").unwrap().resolve();
        assert!(bad_family.unwrap_err().contains("lambda / 2"));
        assert!(parse_family("0.1:0.9").is_err());
        assert_eq!(
            parse_family("0.01:0.99:99").unwrap(),
            FamilySpec { min: 0.01, max: 0.99, n: 99 }
        );
    }
}
