//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use thermolyap::functionals::HomogeneousReference;
use thermolyap::simulator::{Perturbation, SimConfig};
use thermolyap::verify::VerifyOptions;
use thermolyap::{EosSpec, Grid1D};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

type Result<T> = std::result::Result<T, ConfigError>;

const KEYS: &[&str] = &[
    "grid.length",
    "grid.n_cells",
    "eos.kind",
    "eos.cv_ref",
    "eos.gamma",
    "eos.b",
    "eos.theta_ref",
    "eos.rho_ref",
    "ref.theta",
    "ref.rho",
    "sim.mu",
    "sim.kappa",
    "sim.cfl",
    "sim.t_end",
    "sim.output_every",
    "init.k",
    "init.a_rho",
    "init.a_v",
    "init.a_theta",
    "verify.seed",
    "verify.samples",
];

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub grid: Grid1D,
    pub eos: EosSpec,
    pub reference: HomogeneousReference,
    pub sim: SimConfig,
    pub verify: VerifyOptions,
}

/// Raw key/value pairs with the line each came from.
struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {lineno}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError(format!("line {lineno}: unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(ConfigError(format!("line {lineno}: empty value for `{key}`")));
            }
            if let Some((first, _)) = map.insert(key.to_string(), (lineno, value.to_string())) {
                return Err(ConfigError(format!(
                    "line {lineno}: `{key}` already set on line {first}"
                )));
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.0.get(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse()
                .map_err(|_| ConfigError(format!("line {line}: cannot parse `{v}` for `{key}`"))),
        }
    }
}

fn wrap(what: &'static str) -> impl Fn(thermolyap::Error) -> ConfigError {
    move |err| ConfigError(format!("{what}: {err}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let e = Entries::parse(text)?;

        let grid = Grid1D::new(e.get("grid.length", 1.0)?, e.get("grid.n_cells", 100)?)
            .map_err(wrap("grid"))?;

        let cv = e.get("eos.cv_ref", 1.0)?;
        let gamma = e.get("eos.gamma", 1.4)?;
        let theta_ref = e.get("eos.theta_ref", 1.0)?;
        let rho_ref = e.get("eos.rho_ref", 1.0)?;
        let kind: String = e.get("eos.kind", "ideal".to_string())?;
        let eos = match kind.as_str() {
            "ideal" => {
                if let Some((line, _)) = e.raw("eos.b") {
                    return Err(ConfigError(format!(
                        "line {line}: `eos.b` only applies to eos.kind = covolume"
                    )));
                }
                EosSpec::ideal_gas(cv, gamma, theta_ref, rho_ref)
            }
            "covolume" => {
                if e.raw("eos.b").is_none() {
                    return Err(ConfigError("eos.kind = covolume requires `eos.b`".into()));
                }
                EosSpec::covolume_gas(cv, gamma, e.get("eos.b", 0.0)?, theta_ref, rho_ref)
            }
            other => {
                return Err(ConfigError(format!(
                    "eos.kind must be `ideal` or `covolume`, got `{other}`"
                )))
            }
        }
        .map_err(wrap("eos"))?;

        let reference = HomogeneousReference::new(e.get("ref.theta", 1.0)?, e.get("ref.rho", 1.0)?)
            .map_err(wrap("ref"))?;
        if !eos.contains(reference.theta_hat, reference.rho_hat) {
            return Err(ConfigError(format!(
                "ref: state ({}, {}) is outside the equation-of-state domain",
                reference.theta_hat, reference.rho_hat
            )));
        }

        let mu = e.get("sim.mu", 1e-2)?;
        let kappa = e.get("sim.kappa", 1e-2)?;
        let t_end = match e.raw("sim.t_end").map(|(_, v)| v.as_str()) {
            None | Some("auto") => {
                SimConfig::diffusive_time(&grid, &eos, reference, mu, kappa).map_err(wrap("sim"))?
            }
            Some(_) => e.get("sim.t_end", 0.0)?,
        };
        let sim = SimConfig {
            grid,
            eos: eos.clone(),
            reference,
            mu,
            kappa,
            cfl: e.get("sim.cfl", 0.9)?,
            t_end,
            output_every: e.get("sim.output_every", 5)?,
            init: Perturbation {
                k: e.get("init.k", 1)?,
                a_rho: e.get("init.a_rho", 0.01)?,
                a_v: e.get("init.a_v", 0.01)?,
                a_theta: e.get("init.a_theta", 0.01)?,
            },
        };
        sim.validate().map_err(wrap("sim"))?;
        thermolyap::simulator::init_perturbed(&sim).map_err(wrap("init"))?;

        let defaults = VerifyOptions::default();
        let verify = VerifyOptions {
            seed: e.get("verify.seed", defaults.seed)?,
            samples: e.get("verify.samples", defaults.samples)?,
        };
        if verify.samples == 0 {
            return Err(ConfigError("verify.samples must be at least 1".into()));
        }

        Ok(Self {
            grid,
            eos,
            reference,
            sim,
            verify,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.grid.n_cells(), 100);
        assert_eq!(c.eos.kind(), "ideal");
        assert_eq!(c.verify.seed, 0);
        assert_eq!(c.verify.samples, 1000);
        assert_eq!(c.sim.output_every, 5);
        let auto = SimConfig::diffusive_time(&c.grid, &c.eos, c.reference, 1e-2, 1e-2).unwrap();
        assert_eq!(c.sim.t_end, auto);
    }

    #[test]
    fn comments_and_whitespace() {
        let c = RunConfig::parse("# header\n  grid.n_cells = 12   # trailing\n\nsim.t_end=auto\n").unwrap();
        assert_eq!(c.grid.n_cells(), 12);
    }

    #[test]
    fn covolume_needs_b() {
        assert!(RunConfig::parse("eos.kind = covolume").is_err());
        let c = RunConfig::parse("eos.kind = covolume\neos.b = 0.1").unwrap();
        assert_eq!(c.eos.kind(), "covolume");
        assert!(RunConfig::parse("eos.b = 0.1").is_err());
    }

    #[test]
    fn rejections() {
        for bad in [
            "grid.cells = 10",
            "grid.n_cells = ten",
            "grid.n_cells = 10\ngrid.n_cells = 11",
            "grid.n_cells",
            "eos.kind = vdw",
            "eos.gamma = 0.9",
            "ref.rho = -1",
            "sim.cfl = 2",
            "sim.output_every = 0",
            "init.a_theta = 1.5",
            "eos.kind = covolume\neos.b = 0.5\nref.rho = 3",
            "verify.samples = 0",
        ] {
            assert!(RunConfig::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn errors_name_the_line() {
        let e = RunConfig::parse("\n\nfoo = 1").unwrap_err();
        assert!(e.0.contains("line 3"), "{e}");
    }
}
