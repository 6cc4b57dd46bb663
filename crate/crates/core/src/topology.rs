//! Sensor deployments, sink placement and the range-limited communication graph.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance in meters.
    pub fn distance(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Where sinks go on the square region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SinkLayout {
    /// One sink in the middle of the region.
    #[default]
    Center,
    /// `k x k` sinks at the centres of an even grid of cells.
    Grid(usize),
}

impl SinkLayout {
    fn positions(&self, side: f64) -> Result<Vec<Position>> {
        match *self {
            SinkLayout::Center => Ok(vec![Position::new(side / 2.0, side / 2.0)]),
            SinkLayout::Grid(0) => Err(Error::InvalidConfig(
                "grid sink layout needs k >= 1".into(),
            )),
            SinkLayout::Grid(k) => {
                let coord = |t: usize| side * (2 * t + 1) as f64 / (2 * k) as f64;
                let mut out = Vec::with_capacity(k * k);
                for tx in 0..k {
                    for ty in 0..k {
                        out.push(Position::new(coord(tx), coord(ty)));
                    }
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for SinkLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SinkLayout::Center => write!(f, "center"),
            SinkLayout::Grid(k) => write!(f, "grid:{k}"),
        }
    }
}

impl FromStr for SinkLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "center" {
            return Ok(SinkLayout::Center);
        }
        if let Some(k) = s.strip_prefix("grid:") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad sink grid size in {s:?}")))?;
            if k == 0 {
                return Err(Error::InvalidConfig("grid sink layout needs k >= 1".into()));
            }
            return Ok(SinkLayout::Grid(k));
        }
        Err(Error::InvalidConfig(format!(
            "unknown sink layout {s:?} (expected `center` or `grid:k`)"
        )))
    }
}

impl TryFrom<String> for SinkLayout {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SinkLayout> for String {
    fn from(layout: SinkLayout) -> Self {
        layout.to_string()
    }
}

/// Either end of a distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeId {
    Sensor(usize),
    Sink(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub sensor_positions: Vec<Position>,
    pub sink_positions: Vec<Position>,
    /// Index into `sink_positions` of the sink serving each sensor.
    pub sink_of: Vec<usize>,
    pub side_length: f64,
}

impl Deployment {
    /// Drops `m` sensors i.i.d. uniformly on `[0, side_length]^2` and serves
    /// them from a single central sink.
    pub fn uniform(m: usize, side_length: f64, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("sensor count must be at least 1".into()));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "side length must be positive, got {side_length}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sensor_positions = (0..m)
            .map(|_| {
                Position::new(
                    rng.gen_range(0.0..=side_length),
                    rng.gen_range(0.0..=side_length),
                )
            })
            .collect();
        Self::from_positions(sensor_positions, side_length)
    }

    /// Wraps explicit sensor positions (served by a central sink).
    pub fn from_positions(sensor_positions: Vec<Position>, side_length: f64) -> Result<Self> {
        if sensor_positions.is_empty() {
            return Err(Error::InvalidConfig("sensor count must be at least 1".into()));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "side length must be positive, got {side_length}"
            )));
        }
        Self {
            sensor_positions,
            sink_positions: Vec::new(),
            sink_of: Vec::new(),
            side_length,
        }
        .with_sinks(SinkLayout::Center)
    }

    /// Re-places the sinks according to `layout` and reassigns every sensor
    /// to its nearest sink (lowest sink id on ties).
    pub fn with_sinks(self, layout: SinkLayout) -> Result<Self> {
        let sinks = layout.positions(self.side_length)?;
        self.with_sink_positions(sinks)
    }

    pub fn with_sink_positions(mut self, sinks: Vec<Position>) -> Result<Self> {
        if sinks.is_empty() {
            return Err(Error::InvalidConfig("at least one sink is required".into()));
        }
        self.sink_of = self
            .sensor_positions
            .iter()
            .map(|p| {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (k, s) in sinks.iter().enumerate() {
                    let d = p.distance(s);
                    if d < best_d {
                        best = k;
                        best_d = d;
                    }
                }
                best
            })
            .collect();
        self.sink_positions = sinks;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.sensor_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensor_positions.is_empty()
    }

    fn position(&self, node: NodeId) -> Result<&Position> {
        match node {
            NodeId::Sensor(i) => self
                .sensor_positions
                .get(i)
                .ok_or(Error::UnknownId { kind: "sensor", id: i }),
            NodeId::Sink(k) => self
                .sink_positions
                .get(k)
                .ok_or(Error::UnknownId { kind: "sink", id: k }),
        }
    }

    /// Euclidean distance between sensor `i` and another sensor or a sink.
    pub fn distance(&self, i: usize, other: NodeId) -> Result<f64> {
        let a = self.position(NodeId::Sensor(i))?;
        let b = self.position(other)?;
        Ok(a.distance(b))
    }

    /// Distance from sensor `i` to the sink that serves it.
    pub fn sink_distance(&self, i: usize) -> Result<f64> {
        let k = *self
            .sink_of
            .get(i)
            .ok_or(Error::UnknownId { kind: "sensor", id: i })?;
        self.distance(i, NodeId::Sink(k))
    }
}

/// Communication graph: `j` is a neighbour of `i` iff `d(i, j) < r` and `i != j`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    pub comm_range: f64,
    /// Neighbours of each sensor, ascending by id.
    pub adjacency: Vec<Vec<usize>>,
    /// Neighbours of each sensor, nearest first (ties by lower id).
    pub ordered_neighbors: Vec<Vec<usize>>,
    /// Neighbours and neighbours-of-neighbours, ascending by id, self excluded.
    pub two_hop: Vec<Vec<usize>>,
}

impl NetworkGraph {
    pub fn build(deployment: &Deployment, r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "communication range must be non-negative, got {r}"
            )));
        }
        let pos = &deployment.sensor_positions;
        let m = pos.len();
        let mut adjacency = vec![Vec::new(); m];

        if r > 0.0 && r.is_finite() {
            // Bucket sensors into r-sized cells so only the 3x3 block around a
            // sensor's cell has to be scanned.
            let cell = |p: &Position| ((p.x / r).floor() as i64, (p.y / r).floor() as i64);
            let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
            for (i, p) in pos.iter().enumerate() {
                buckets.entry(cell(p)).or_default().push(i);
            }
            for (i, p) in pos.iter().enumerate() {
                let (cx, cy) = cell(p);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(bucket) = buckets.get(&(cx + dx, cy + dy)) {
                            for &j in bucket {
                                if j != i && p.distance(&pos[j]) < r {
                                    adjacency[i].push(j);
                                }
                            }
                        }
                    }
                }
                adjacency[i].sort_unstable();
            }
        } else if r.is_infinite() {
            for (i, row) in adjacency.iter_mut().enumerate() {
                row.extend((0..m).filter(|&j| j != i));
            }
        }

        let ordered_neighbors = adjacency
            .iter()
            .enumerate()
            .map(|(i, nbrs)| {
                let mut sorted = nbrs.clone();
                sorted.sort_by(|&a, &b| {
                    pos[i]
                        .distance(&pos[a])
                        .total_cmp(&pos[i].distance(&pos[b]))
                        .then(a.cmp(&b))
                });
                sorted
            })
            .collect();

        let two_hop = (0..m)
            .map(|i| {
                let mut set: Vec<usize> = adjacency[i]
                    .iter()
                    .flat_map(|&j| std::iter::once(j).chain(adjacency[j].iter().copied()))
                    .filter(|&k| k != i)
                    .collect();
                set.sort_unstable();
                set.dedup();
                set
            })
            .collect();

        Ok(Self {
            comm_range: r,
            adjacency,
            ordered_neighbors,
            two_hop,
        })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }
}
