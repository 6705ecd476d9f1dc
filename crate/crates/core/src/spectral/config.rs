use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{DomainGraph, RegionId, EXTERIOR};

/// Choice of `γ_r = α_r/α₁` for one region. P2 and P3 name an oriented
/// reference pair `(k, ℓ)` whose region `k` is fixed by P1 (or is region 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    P1,
    P2 { reference: (RegionId, RegionId) },
    P3 { reference: (RegionId, RegionId) },
}

impl Pattern {
    pub fn reference(&self) -> Option<(RegionId, RegionId)> {
        match *self {
            Pattern::P1 => None,
            Pattern::P2 { reference } | Pattern::P3 { reference } => Some(reference),
        }
    }

    /// 0 for P1, 1 for P2, 2 for P3.
    pub fn rank(&self) -> u8 {
        match self {
            Pattern::P1 => 0,
            Pattern::P2 { .. } => 1,
            Pattern::P3 { .. } => 2,
        }
    }

    fn kind(&self) -> &'static str {
        ["P1", "P2", "P3"][self.rank() as usize]
    }

    fn with_kind(kind: &str, reference: Option<(RegionId, RegionId)>) -> Result<Self> {
        match (kind, reference) {
            ("P1", None) => Ok(Pattern::P1),
            ("P2", Some(reference)) => Ok(Pattern::P2 { reference }),
            ("P3", Some(reference)) => Ok(Pattern::P3 { reference }),
            ("P1", Some(_)) => Err(Error::Config("P1 takes no reference pair".into())),
            ("P2" | "P3", None) => Err(Error::Config(format!("{kind} needs a reference pair"))),
            _ => Err(Error::Config(format!("unknown pattern {kind:?}"))),
        }
    }
}

fn fmt_pair((a, b): (RegionId, RegionId)) -> String {
    if a < 10 && b < 10 {
        format!("{a}{b}")
    } else {
        format!("{a}-{b}")
    }
}

fn parse_pair(s: &str) -> Result<(RegionId, RegionId)> {
    let bad = || Error::Config(format!("bad region pair {s:?}"));
    let parse = |t: &str| -> Result<RegionId> {
        if t.is_empty() || !t.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse().map_err(|_| bad())
    };
    if let Some((a, b)) = s.split_once('-') {
        return Ok((parse(a)?, parse(b)?));
    }
    if s.len() == 2 && s.is_ascii() {
        return Ok((parse(&s[..1])?, parse(&s[1..])?));
    }
    Err(bad())
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reference() {
            None => f.write_str("P1"),
            Some(r) => write!(f, "{}_{}", self.kind(), fmt_pair(r)),
        }
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// `P1`, `P2_12`, `P3_15`, or with dashes for ids above 9: `P2_10-2`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('_') {
            None => Pattern::with_kind(s, None),
            Some((kind, pair)) => Pattern::with_kind(kind, Some(parse_pair(pair)?)),
        }
    }
}

/// Interface orientations plus one pattern per region, relative to a base graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BieConfig {
    /// Indexed like the base graph's interfaces.
    pub flips: Vec<bool>,
    /// Indexed by `region − 1`.
    pub patterns: Vec<Pattern>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    interfaces: Vec<[RegionId; 2]>,
    #[serde(default)]
    patterns: Vec<PatternEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternEntry {
    region: RegionId,
    pattern: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<[RegionId; 2]>,
}

impl BieConfig {
    /// Base orientation, P1 everywhere.
    pub fn identity(base: &DomainGraph) -> Self {
        Self {
            flips: vec![false; base.len()],
            patterns: vec![Pattern::P1; base.num_regions()],
        }
    }

    pub fn num_flips(&self) -> usize {
        self.flips.iter().filter(|&&f| f).count()
    }

    /// The base graph with the flips applied.
    pub fn oriented(&self, base: &DomainGraph) -> Result<DomainGraph> {
        if self.flips.len() != base.len() {
            return Err(Error::DimensionMismatch {
                expected: base.len(),
                got: self.flips.len(),
            });
        }
        let mut g = base.clone();
        for (b, _) in self.flips.iter().enumerate().filter(|(_, f)| **f) {
            g = g.flip_interface(b)?;
        }
        Ok(g)
    }

    fn set_orientation(&mut self, base: &DomainGraph, (i, j): (RegionId, RegionId), seen: &mut [bool]) -> Result<()> {
        let b = base
            .interfaces()
            .iter()
            .position(|f| (f.from, f.to) == (i, j) || (f.from, f.to) == (j, i))
            .ok_or_else(|| Error::Config(format!("no interface between regions {i} and {j}")))?;
        if std::mem::replace(&mut seen[b], true) {
            return Err(Error::Config(format!("interface ({i},{j}) listed twice")));
        }
        let flip = base.interfaces()[b].from != i;
        if flip && base.interfaces()[b].is_exterior() {
            return Err(Error::ExteriorFlip { from: i, to: j });
        }
        self.flips[b] = flip;
        Ok(())
    }

    fn set_pattern(&mut self, region: RegionId, pattern: Pattern, assigned: &mut [bool]) -> Result<()> {
        if region == 0 || region > self.patterns.len() {
            return Err(Error::UnknownRegion(region));
        }
        if region == EXTERIOR && pattern != Pattern::P1 {
            return Err(Error::Config(format!("region 1 has a fixed coefficient, cannot use {pattern}")));
        }
        let slot = &mut self.patterns[region - 1];
        if assigned[region - 1] && *slot != pattern {
            return Err(Error::Config(format!("region {region} assigned both {slot} and {pattern}")));
        }
        *slot = pattern;
        assigned[region - 1] = true;
        Ok(())
    }

    /// Compact form: whitespace-separated tokens `ij` or `ij:PATTERN`, one
    /// per oriented interface, e.g. `23:P1 34:P2_12 45:P2_52`. The pattern
    /// belongs to the source region `i`. Unlisted interfaces keep the base
    /// orientation, unlisted regions use P1.
    pub fn from_notation(s: &str, base: &DomainGraph) -> Result<Self> {
        let mut cfg = Self::identity(base);
        let mut seen = vec![false; base.len()];
        let mut assigned = vec![false; base.num_regions()];
        for token in s.split_whitespace() {
            let (pair, pattern) = match token.split_once(':') {
                Some((p, pat)) => (p, Some(pat.parse::<Pattern>()?)),
                None => (token, None),
            };
            let (i, j) = parse_pair(pair)?;
            cfg.set_orientation(base, (i, j), &mut seen)?;
            if let Some(p) = pattern {
                cfg.set_pattern(i, p, &mut assigned)?;
            }
        }
        Ok(cfg)
    }

    /// Inverse of [`from_notation`](Self::from_notation): every interior
    /// interface in base order with its source region's pattern.
    pub fn to_notation(&self, base: &DomainGraph) -> Result<String> {
        let g = self.oriented(base)?;
        let tokens: Vec<String> = g
            .interfaces()
            .iter()
            .filter(|f| !f.is_exterior())
            .map(|f| format!("{}:{}", fmt_pair((f.from, f.to)), self.patterns[f.from - 1]))
            .collect();
        Ok(tokens.join(" "))
    }

    /// `{"interfaces": [[3,2]], "patterns": [{"region": 3, "pattern": "P3", "reference": [1,2]}]}`.
    /// Both keys are optional and follow the same defaults as the notation.
    pub fn from_json_str(s: &str, base: &DomainGraph) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(s)?;
        let mut cfg = Self::identity(base);
        let mut seen = vec![false; base.len()];
        for [i, j] in file.interfaces {
            cfg.set_orientation(base, (i, j), &mut seen)?;
        }
        let mut assigned = vec![false; base.num_regions()];
        for e in file.patterns {
            let p = Pattern::with_kind(&e.pattern, e.reference.map(|[k, l]| (k, l)))?;
            cfg.set_pattern(e.region, p, &mut assigned)?;
        }
        Ok(cfg)
    }

    pub fn to_json_string(&self, base: &DomainGraph) -> Result<String> {
        let g = self.oriented(base)?;
        let file = ConfigFile {
            interfaces: g.interfaces().iter().map(|f| [f.from, f.to]).collect(),
            patterns: self
                .patterns
                .iter()
                .enumerate()
                .filter(|(_, p)| **p != Pattern::P1)
                .map(|(r, p)| PatternEntry {
                    region: r + 1,
                    pattern: p.kind().into(),
                    reference: p.reference().map(|(k, l)| [k, l]),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// JSON if the text starts with `{`, the compact notation otherwise.
    pub fn parse(s: &str, base: &DomainGraph) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json_str(s, base)
        } else {
            Self::from_notation(s, base)
        }
    }
}
