use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colour(pub u32);

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Assignment of colours `1..=t` to vertices. Properness is checked on
/// demand against a graph, it is not a construction invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexColouring {
    colours: u32,
    assignment: BTreeMap<VertexId, Colour>,
}

impl VertexColouring {
    pub fn new(colours: u32) -> Self {
        VertexColouring {
            colours,
            assignment: BTreeMap::new(),
        }
    }

    /// Colours vertex `i` (1-based) with `colours[i-1]`.
    pub fn from_slice(t: u32, colours: &[u32]) -> Result<Self> {
        let mut f = VertexColouring::new(t);
        for (i, &c) in colours.iter().enumerate() {
            f.set(VertexId(i as u32 + 1), Colour(c))?;
        }
        Ok(f)
    }

    /// Vertex `v` gets colour `v` for every vertex of `g`; `g` must have ids `1..=n`.
    pub fn identity(g: &MultiGraph) -> Self {
        let t = g.vertex_count() as u32;
        let mut f = VertexColouring::new(t);
        for (i, v) in g.vertices().enumerate() {
            f.assignment.insert(v, Colour(i as u32 + 1));
        }
        f
    }

    pub fn colours(&self) -> u32 {
        self.colours
    }

    pub fn set(&mut self, v: VertexId, c: Colour) -> Result<()> {
        if c.0 == 0 || c.0 > self.colours {
            return Err(Error::ColourOutOfRange {
                colour: c.0,
                max: self.colours,
            });
        }
        self.assignment.insert(v, c);
        Ok(())
    }

    pub fn remove(&mut self, v: VertexId) -> Option<Colour> {
        self.assignment.remove(&v)
    }

    pub fn colour(&self, v: VertexId) -> Option<Colour> {
        self.assignment.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Colour)> + '_ {
        self.assignment.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn palette(&self) -> impl Iterator<Item = Colour> {
        (1..=self.colours).map(Colour)
    }

    /// Colour class `C_c`.
    pub fn class(&self, c: Colour) -> BTreeSet<VertexId> {
        self.assignment
            .iter()
            .filter(|(_, &x)| x == c)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Errors unless every vertex of `g` has a colour.
    pub fn check_covers(&self, g: &MultiGraph) -> Result<()> {
        match g.vertices().find(|v| !self.assignment.contains_key(v)) {
            Some(v) => Err(Error::Uncoloured(v)),
            None => Ok(()),
        }
    }

    pub fn monochromatic_edge(&self, g: &MultiGraph) -> Option<EdgeId> {
        g.edges()
            .find(|&(_, (u, v))| self.colour(u).is_some() && self.colour(u) == self.colour(v))
            .map(|(e, _)| e)
    }

    /// Covers `g` and has no monochromatic edge.
    pub fn check_proper(&self, g: &MultiGraph) -> Result<()> {
        self.check_covers(g)?;
        match self.monochromatic_edge(g) {
            Some(e) => Err(Error::ImproperColouring(e)),
            None => Ok(()),
        }
    }

    /// Restriction to the vertices of `g`.
    pub fn restricted_to(&self, g: &MultiGraph) -> VertexColouring {
        VertexColouring {
            colours: self.colours,
            assignment: g.vertices().filter_map(|v| self.colour(v).map(|c| (v, c))).collect(),
        }
    }
}
