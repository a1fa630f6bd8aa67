//! Per-command configuration keys and their resolution from defaults,
//! manifests, config files and flags.

use std::collections::BTreeMap;
use std::fmt;

use contperc::rng::hash_str;

pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, default, help }
}

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
}

const SEED: Key = key("seed", Some("1"), "master seed");
const REPS: Key = key("reps", Some("100"), "Monte Carlo replicates");
const CONFIDENCE: Key = key("confidence", Some("0.95"), "confidence level of intervals");
const LAMBDA: Key = key("lambda", Some("2"), "Poisson intensity");
const P: Key = key("p", Some("1"), "bond retention probability");

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "sample",
        about: "Sample a Poisson point set and write it as CSV",
        keys: &[LAMBDA, key("area", Some("100"), "area of the square window"), SEED],
    },
    CommandSpec {
        name: "components",
        about: "Component statistics of G(lambda,p), or the isolated-square probe",
        keys: &[
            LAMBDA,
            P,
            key("n", Some("1000,10000"), "window areas (comma-separated, increasing)"),
            REPS,
            SEED,
            key("mode", Some("summary"), "summary | isolated"),
            key("c", Some("1"), "isolated mode: component size threshold c (ln n)^2"),
            key("side", None, "isolated mode: square side (default ln n / (5 lambda))"),
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "crossing",
        about: "Crossing probabilities of [0,kappa R]x[0,R] over a list of R",
        keys: &[
            LAMBDA,
            P,
            key("kappa", Some("3"), "aspect ratio"),
            key("R", Some("10,20,30,40"), "rectangle heights (comma-separated, increasing)"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "circuit",
        about: "Probability of a circuit in a square annulus",
        keys: &[
            LAMBDA,
            P,
            key("r_in", Some("2"), "inner half-width"),
            key("r_out", Some("6"), "outer half-width"),
            key("circuit_mode", Some("surrounding"), "surrounding | any_cycle"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "theta",
        about: "Largest-component density L1/(lambda n) over window sizes",
        keys: &[LAMBDA, P, key("n", Some("1000,10000,100000"), "window areas"), REPS, SEED, CONFIDENCE],
    },
    CommandSpec {
        name: "scaling",
        about: "Second-largest component against (ln n)^2",
        keys: &[LAMBDA, P, key("n", Some("4096,16384,65536,262144"), "window areas"), REPS, SEED, CONFIDENCE],
    },
    CommandSpec {
        name: "threshold",
        about: "Bisection estimate of lambda_c(p) or p_c(lambda)",
        keys: &[
            key("mode", Some("lambda_c"), "lambda_c | p_c"),
            key("lambda", None, "intensity (p_c mode)"),
            key("p", None, "bond probability (lambda_c mode)"),
            key("R", Some("20"), "criterion scale"),
            key("aspect", Some("2"), "criterion rectangle aspect"),
            key("level", Some("0.5"), "criterion crossing level"),
            key("resolution", None, "final bracket width (default 0.1 for lambda, 1/128 for p)"),
            key("lambda_max", Some("8"), "upper end of the intensity search range"),
            key("doubling", Some("true"), "repeat at R/2 and require stability"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "duality",
        about: "Round trip lambda -> p_c(lambda) -> lambda_c(p_c(lambda))",
        keys: &[
            LAMBDA,
            key("R", Some("20"), "criterion scale"),
            key("aspect", Some("2"), "criterion rectangle aspect"),
            key("level", Some("0.5"), "criterion crossing level"),
            key("lambda_resolution", Some("0.1"), "bracket width in lambda"),
            key("p_resolution", Some("0.0078125"), "bracket width in p"),
            key("lambda_max", Some("8"), "upper end of the intensity search range"),
            key("doubling", Some("true"), "repeat at R/2 and require stability"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "locality",
        about: "p_c of degree-truncated or distance-thinned samples",
        keys: &[
            LAMBDA,
            key("transform", Some("degree_truncate"), "degree_truncate | distance_thin"),
            key("levels", Some("5,7,9,11,15"), "k values or thinning radii (increasing)"),
            key("R", Some("20"), "criterion scale"),
            key("aspect", Some("2"), "criterion rectangle aspect"),
            key("level", Some("0.5"), "criterion crossing level"),
            key("p_resolution", Some("0.0078125"), "bracket width in p"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "lattice",
        about: "Bond percolation on a box of Z^2, or point-to-point decay",
        keys: &[
            key("mode", Some("sample"), "sample | decay"),
            key("width", Some("40"), "box width"),
            key("height", Some("20"), "box height"),
            key("q", Some("0.5"), "edge probability"),
            key("k", Some("1"), "order of the k-th component reported"),
            key("x", Some("0"), "vertex x for the k-th component"),
            key("y", Some("0"), "vertex y for the k-th component"),
            key("distances", Some("2,4,6,8"), "decay mode: distances"),
            REPS,
            SEED,
        ],
    },
    CommandSpec {
        name: "haux",
        about: "Domino coarse-graining of a continuum sample",
        keys: &[
            key("lambda_prime", Some("1.8"), "base intensity"),
            key("lambda", Some("2"), "intensity after sprinkling"),
            P,
            key("R", Some("6"), "square side of the tessellation"),
            key("squares", Some("4"), "squares per window side"),
            key("n_inner", Some("8"), "inner rectangle thinning parameter"),
            key("K", Some("0"), "surrounding circuits required per junction"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "fkg",
        about: "Covariance of increasing events, site thinning, Poisson tails",
        keys: &[
            key("lambda", Some("1.6"), "intensity"),
            P,
            key("side", Some("10"), "square side"),
            key("pairs", Some("same,parallel_crossings,crossing_and_count"), "event pairs"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
    CommandSpec {
        name: "criterion",
        about: "Finite-size event A_{Q,Q'} on adjacent squares of area m",
        keys: &[
            LAMBDA,
            P,
            key("m", Some("1600"), "square area"),
            key("theta", None, "reference density (default: estimated at theta_n)"),
            key("theta_n", Some("100000"), "window area for the reference density"),
            key("theta_reps", Some("10"), "replicates for the reference density"),
            REPS,
            SEED,
            CONFIDENCE,
        ],
    },
];

pub fn spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

/// Fully resolved key-value configuration of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub command: &'static str,
    pub values: BTreeMap<String, String>,
}

impl Resolved {
    pub fn new(command: &'static CommandSpec) -> Self {
        let values = command
            .keys
            .iter()
            .filter_map(|k| k.default.map(|d| (k.name.to_string(), d.to_string())))
            .collect();
        Resolved { command: command.name, values }
    }

    pub fn set(&mut self, key: &str, value: &str) -> ConfigResult<()> {
        let spec = spec(self.command).expect("known command");
        if !spec.keys.iter().any(|k| k.name == key) {
            return err(format!("unknown key '{key}' for command '{}'", self.command));
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// Lines `key = value`; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, text: &str) -> ConfigResult<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("config line {}: expected 'key = value'", i + 1));
            };
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.values).expect("string map")
    }

    /// Hex hash of the command and its canonical (sorted) configuration.
    pub fn hash(&self) -> String {
        let canon = format!("{}|{}", self.command, self.to_json());
        format!("{:016x}", hash_str(&canon))
    }

    pub fn opt_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str(&self, key: &str) -> ConfigResult<&str> {
        self.opt_str(key).ok_or_else(|| ConfigError(format!("missing required key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> ConfigResult<f64> {
        let s = self.str(key)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => err(format!("'{key}' must be a finite number, got '{s}'")),
        }
    }

    pub fn opt_f64(&self, key: &str) -> ConfigResult<Option<f64>> {
        self.opt_str(key).map(|_| self.f64(key)).transpose()
    }

    pub fn prob(&self, key: &str) -> ConfigResult<f64> {
        let v = self.f64(key)?;
        if !(0.0..=1.0).contains(&v) {
            return err(format!("'{key}' must lie in [0,1], got {v}"));
        }
        Ok(v)
    }

    pub fn positive(&self, key: &str) -> ConfigResult<f64> {
        let v = self.f64(key)?;
        if v <= 0.0 {
            return err(format!("'{key}' must be positive, got {v}"));
        }
        Ok(v)
    }

    pub fn non_negative(&self, key: &str) -> ConfigResult<f64> {
        let v = self.f64(key)?;
        if v < 0.0 {
            return err(format!("'{key}' must be non-negative, got {v}"));
        }
        Ok(v)
    }

    pub fn u64(&self, key: &str) -> ConfigResult<u64> {
        let s = self.str(key)?;
        s.parse().map_err(|_| ConfigError(format!("'{key}' must be a non-negative integer, got '{s}'")))
    }

    pub fn usize(&self, key: &str) -> ConfigResult<usize> {
        Ok(self.u64(key)? as usize)
    }

    pub fn bool(&self, key: &str) -> ConfigResult<bool> {
        match self.str(key)? {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            s => err(format!("'{key}' must be true or false, got '{s}'")),
        }
    }

    /// Non-empty, strictly increasing list of positive numbers.
    pub fn schedule(&self, key: &str) -> ConfigResult<Vec<f64>> {
        let s = self.str(key)?;
        let mut out = Vec::new();
        for tok in s.split(',') {
            match tok.trim().parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => out.push(v),
                _ => return err(format!("'{key}' must be a list of positive numbers, got '{s}'")),
            }
        }
        if out.windows(2).any(|w| w[0] >= w[1]) {
            return err(format!("'{key}' must be strictly increasing, got '{s}'"));
        }
        Ok(out)
    }

    pub fn int_schedule(&self, key: &str) -> ConfigResult<Vec<usize>> {
        let xs = self.schedule(key)?;
        if xs.iter().any(|x| x.fract() != 0.0) {
            return err(format!("'{key}' must list integers"));
        }
        Ok(xs.into_iter().map(|x| x as usize).collect())
    }

    pub fn words(&self, key: &str) -> ConfigResult<Vec<String>> {
        let v: Vec<String> = self.str(key)?.split(',').map(|s| s.trim().to_string()).collect();
        if v.iter().any(String::is_empty) {
            return err(format!("'{key}' has an empty entry"));
        }
        Ok(v)
    }
}
