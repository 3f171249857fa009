//! `family:key=value,...` graph specifications.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::builders::{self, RandomGraphOptions};
use super::{io, SymmetricArcGraph};
use crate::error::{Error, Result};
use crate::operators::Profile;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSpec {
    Cycle {
        n: usize,
    },
    Torus {
        d: usize,
        side: usize,
    },
    Complete {
        n: usize,
    },
    Tree {
        d: usize,
        depth: usize,
    },
    SierpinskiPre {
        d: usize,
        level: usize,
    },
    SierpinskiDouble {
        d: usize,
        level: usize,
    },
    /// Not a graph: the two-block coisometry model on a grid.
    PartitionOfUnity {
        grid_points: usize,
        profile: Profile,
    },
    File {
        path: PathBuf,
    },
    Random(RandomGraphOptions),
}

impl GraphSpec {
    pub fn family(&self) -> &'static str {
        match self {
            GraphSpec::Cycle { .. } => "cycle",
            GraphSpec::Torus { .. } => "torus",
            GraphSpec::Complete { .. } => "complete",
            GraphSpec::Tree { .. } => "tree",
            GraphSpec::SierpinskiPre { .. } => "sierpinski-pre",
            GraphSpec::SierpinskiDouble { .. } => "sierpinski-double",
            GraphSpec::PartitionOfUnity { .. } => "partition-of-unity",
            GraphSpec::File { .. } => "file",
            GraphSpec::Random(_) => "random",
        }
    }

    pub fn is_graph(&self) -> bool {
        !matches!(self, GraphSpec::PartitionOfUnity { .. })
    }

    pub fn build_graph(&self) -> Result<SymmetricArcGraph> {
        match self {
            GraphSpec::Cycle { n } => builders::build_cycle(*n),
            GraphSpec::Torus { d, side } => builders::build_torus(*d, *side),
            GraphSpec::Complete { n } => builders::build_complete(*n),
            GraphSpec::Tree { d, depth } => builders::build_truncated_tree(*d, *depth),
            GraphSpec::SierpinskiPre { d, level } => builders::build_sierpinski_pre(*d, *level),
            GraphSpec::SierpinskiDouble { d, level } => builders::build_sierpinski_double(*d, *level),
            GraphSpec::Random(opts) => builders::build_random_weighted(*opts),
            GraphSpec::File { path } => io::load_graph(path),
            GraphSpec::PartitionOfUnity { .. } => {
                Err(Error::invalid("partition-of-unity is an abstract model, not a graph"))
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = self.family();
        match self {
            GraphSpec::Cycle { n } | GraphSpec::Complete { n } => write!(f, "{family}:n={n}"),
            GraphSpec::Torus { d, side } => write!(f, "{family}:d={d},side={side}"),
            GraphSpec::Tree { d, depth } => write!(f, "{family}:d={d},depth={depth}"),
            GraphSpec::SierpinskiPre { d, level } | GraphSpec::SierpinskiDouble { d, level } => {
                write!(f, "{family}:d={d},level={level}")
            }
            GraphSpec::PartitionOfUnity { grid_points, profile } => {
                write!(f, "{family}:n={grid_points},profile={profile}")
            }
            GraphSpec::File { path } => write!(f, "{family}:{}", path.display()),
            GraphSpec::Random(o) => {
                write!(
                    f,
                    "{family}:v={},p={:?},seed={}",
                    o.vertices, o.edge_probability, o.seed
                )?;
                if o.complex_weights {
                    write!(f, ",complex")?;
                }
                if o.random_theta {
                    write!(f, ",theta")?;
                }
                Ok(())
            }
        }
    }
}

struct Params {
    family: String,
    positional: Option<String>,
    keyed: BTreeMap<String, String>,
    flags: Vec<String>,
}

impl Params {
    fn parse(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut p = Params {
            family: family.trim().to_ascii_lowercase(),
            positional: None,
            keyed: BTreeMap::new(),
            flags: Vec::new(),
        };
        if p.family == "file" {
            p.positional = Some(rest.to_string());
            return Ok(p);
        }
        for (i, item) in rest.split(',').map(str::trim).filter(|x| !x.is_empty()).enumerate() {
            if let Some((k, v)) = item.split_once('=') {
                if p.keyed.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                    return Err(Error::invalid(format!("repeated key '{k}' in graph spec '{s}'")));
                }
            } else if i == 0 && item.parse::<f64>().is_ok() {
                p.positional = Some(item.to_string());
            } else {
                p.flags.push(item.to_string());
            }
        }
        Ok(p)
    }

    fn take<T: FromStr>(&mut self, keys: &[&str]) -> Result<Option<T>> {
        for k in keys {
            if let Some(v) = self.keyed.remove(*k) {
                return v
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::invalid(format!("{}: invalid value '{v}' for '{k}'", self.family)));
            }
        }
        Ok(None)
    }

    fn require<T: FromStr>(&mut self, keys: &[&str]) -> Result<T> {
        self.take(keys)?
            .ok_or_else(|| Error::invalid(format!("{}: missing parameter '{}'", self.family, keys[0])))
    }

    /// The lone positional value or the first matching key.
    fn primary<T: FromStr>(&mut self, keys: &[&str]) -> Result<T> {
        if let Some(v) = self.positional.take() {
            return v
                .parse()
                .map_err(|_| Error::invalid(format!("{}: invalid value '{v}'", self.family)));
        }
        self.require(keys)
    }

    fn flag(&mut self, name: &str) -> bool {
        let before = self.flags.len();
        self.flags.retain(|f| f != name);
        before != self.flags.len()
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.keyed.keys().next() {
            return Err(Error::invalid(format!("{}: unknown parameter '{k}'", self.family)));
        }
        if let Some(f) = self.flags.first() {
            return Err(Error::invalid(format!("{}: unknown flag '{f}'", self.family)));
        }
        if let Some(p) = self.positional {
            return Err(Error::invalid(format!("{}: unexpected value '{p}'", self.family)));
        }
        Ok(())
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Params::parse(s)?;
        let spec = match p.family.as_str() {
            "cycle" => GraphSpec::Cycle { n: p.primary(&["n"])? },
            "complete" => GraphSpec::Complete { n: p.primary(&["n"])? },
            "torus" => GraphSpec::Torus {
                d: p.require(&["d"])?,
                side: p.require(&["side", "n"])?,
            },
            "tree" => GraphSpec::Tree {
                d: p.require(&["d"])?,
                depth: p.require(&["depth"])?,
            },
            "sierpinski-pre" => GraphSpec::SierpinskiPre {
                d: p.require(&["d"])?,
                level: p.require(&["level", "n"])?,
            },
            "sierpinski-double" => GraphSpec::SierpinskiDouble {
                d: p.require(&["d"])?,
                level: p.require(&["level", "n"])?,
            },
            "partition-of-unity" | "pou" => {
                let grid_points = p.primary(&["n", "grid"])?;
                let profile = match p.take::<String>(&["profile"])? {
                    None => Profile::QuarterCosine,
                    Some(name) => name.parse()?,
                };
                GraphSpec::PartitionOfUnity { grid_points, profile }
            }
            "file" => {
                let path = p.positional.take().unwrap_or_default();
                if path.is_empty() {
                    return Err(Error::invalid("file: missing path"));
                }
                GraphSpec::File { path: path.into() }
            }
            "random" => GraphSpec::Random(RandomGraphOptions {
                vertices: p.require(&["v", "vertices"])?,
                edge_probability: p.require(&["p"])?,
                seed: p.take(&["seed"])?.unwrap_or(0),
                complex_weights: p.flag("complex"),
                random_theta: p.flag("theta"),
            }),
            other => return Err(Error::invalid(format!("unknown graph family '{other}'"))),
        };
        p.finish()?;
        Ok(spec)
    }
}

impl Serialize for GraphSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GraphSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_forms() {
        assert_eq!("cycle:5".parse::<GraphSpec>().unwrap(), GraphSpec::Cycle { n: 5 });
        assert_eq!(
            "sierpinski-pre:d=2,level=2".parse::<GraphSpec>().unwrap(),
            GraphSpec::SierpinskiPre { d: 2, level: 2 }
        );
        assert_eq!(
            "torus:d=2,side=3".parse::<GraphSpec>().unwrap(),
            GraphSpec::Torus { d: 2, side: 3 }
        );
        let r: GraphSpec = "random:v=8,p=0.6,seed=3,complex,theta".parse().unwrap();
        assert_eq!(
            r,
            GraphSpec::Random(RandomGraphOptions {
                vertices: 8,
                edge_probability: 0.6,
                seed: 3,
                complex_weights: true,
                random_theta: true
            })
        );
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "cycle:7",
            "complete:n=4",
            "tree:d=3,depth=2",
            "sierpinski-double:d=2,level=3",
            "random:v=8,p=0.6,seed=3,complex,theta",
            "random:v=5,p=1,seed=0",
            "pou:n=16,profile=constant:0.5",
            "partition-of-unity:4",
        ] {
            let spec: GraphSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<GraphSpec>().unwrap(), spec, "{s}");
        }
    }

    #[test]
    fn rejects_unknown_input() {
        assert!("hypercube:3".parse::<GraphSpec>().is_err());
        assert!("cycle:n=5,extra=1".parse::<GraphSpec>().is_err());
        assert!("cycle:five".parse::<GraphSpec>().is_err());
        assert!("torus:d=2".parse::<GraphSpec>().is_err());
        assert!("random:v=4,p=0.5,sparkly".parse::<GraphSpec>().is_err());
    }
}
