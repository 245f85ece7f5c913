use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sequence of wavelet scales `(j1, ..., jd)`; the empty path is depth 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(scales: impl Into<Vec<usize>>) -> Self {
        Self(scales.into())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn scales(&self) -> &[usize] {
        &self.0
    }

    /// Path without its last scale; `None` for the empty path.
    pub fn parent(&self) -> Option<Path> {
        if self.0.is_empty() {
            None
        } else {
            Some(Path(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ")")
    }
}

/// Which scale sequences a [`PathSet`] admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathPolicy {
    /// Every sequence of in-range scales.
    General,
    /// Nonincreasing scales.
    Descending,
    /// Each scale one below its predecessor.
    AdjacentDescending,
}

impl PathPolicy {
    pub fn code(self) -> u8 {
        match self {
            PathPolicy::General => 0,
            PathPolicy::Descending => 1,
            PathPolicy::AdjacentDescending => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(PathPolicy::General),
            1 => Ok(PathPolicy::Descending),
            2 => Ok(PathPolicy::AdjacentDescending),
            c => Err(Error::Format(format!("unknown path policy code {c}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PathPolicy::General => "general",
            PathPolicy::Descending => "descending",
            PathPolicy::AdjacentDescending => "adjacent-descending",
        }
    }

    /// Whether `next` may follow `prev` in a path.
    pub fn admits(self, prev: usize, next: usize) -> bool {
        match self {
            PathPolicy::General => true,
            PathPolicy::Descending => next <= prev,
            PathPolicy::AdjacentDescending => next + 1 == prev,
        }
    }
}

impl FromStr for PathPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(PathPolicy::General),
            "descending" => Ok(PathPolicy::Descending),
            "adjacent-descending" | "adjacent" => Ok(PathPolicy::AdjacentDescending),
            other => Err(Error::Usage(format!("unknown path policy '{other}'"))),
        }
    }
}

impl fmt::Display for PathPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lexicographically ordered, duplicate-free collection of paths.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    paths: Vec<Path>,
    policy: PathPolicy,
    max_depth: usize,
    j0: usize,
    j_max: usize,
}

impl PathSet {
    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn policy(&self) -> PathPolicy {
        self.policy
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn scale_range(&self) -> (usize, usize) {
        (self.j0, self.j_max)
    }

    pub fn count_at_depth(&self, d: usize) -> usize {
        self.paths.iter().filter(|p| p.depth() == d).count()
    }
}

/// All paths over scales `j0..=j_max` of depth at most `depth` admitted by
/// `policy`, empty path first.
pub fn enumerate_paths(j0: usize, j_max: usize, depth: i64, policy: PathPolicy) -> Result<PathSet> {
    if depth < 0 {
        return Err(Error::InvalidDepth(depth));
    }
    if j0 > j_max {
        return Err(Error::InvalidScaleRange { j0, j_max });
    }
    let max_depth = depth as usize;
    let mut paths = vec![Path::empty()];
    let mut frontier = vec![Path::empty()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for p in &frontier {
            for j in j0..=j_max {
                let ok = p.0.last().is_none_or(|&prev| policy.admits(prev, j));
                if ok {
                    let mut s = p.0.clone();
                    s.push(j);
                    next.push(Path(s));
                }
            }
        }
        paths.extend(next.iter().cloned());
        frontier = next;
    }
    paths.sort();
    paths.dedup();
    Ok(PathSet {
        paths,
        policy,
        max_depth,
        j0,
        j_max,
    })
}
