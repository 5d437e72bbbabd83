use serde::{Deserialize, Serialize};

use super::QcaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Line,
    /// Periodic line.
    Ring,
    Grid {
        width: usize,
        height: usize,
    },
    Explicit,
}

/// A finite metric space with opaque cell ids and integer distances.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Space {
    cells: Vec<String>,
    dist: Vec<Vec<u64>>,
    topology: Topology,
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl Space {
    pub fn new(cells: Vec<String>, dist: Vec<Vec<u64>>) -> Result<Self, QcaError> {
        let n = cells.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(QcaError::BadSpace(format!(
                "distance matrix is not {n}x{n}"
            )));
        }
        for i in 0..n {
            if dist[i][i] != 0 {
                return Err(QcaError::BadSpace(format!(
                    "dist({i},{i}) = {}",
                    dist[i][i]
                )));
            }
            for j in 0..i {
                if dist[i][j] != dist[j][i] {
                    return Err(QcaError::BadSpace(format!(
                        "dist not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &cells {
            if !seen.insert(c) {
                return Err(QcaError::BadSpace(format!("duplicate cell id {c}")));
            }
        }
        'tri: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] {
                        log::warn!("triangle inequality fails at ({i},{j},{k})");
                        break 'tri;
                    }
                }
            }
        }
        Ok(Space {
            cells,
            dist,
            topology: Topology::Explicit,
        })
    }

    /// Cells `0..length` with `dist(i, j) = |i - j|`.
    pub fn line(length: usize) -> Self {
        let dist = (0..length)
            .map(|i| (0..length).map(|j| i.abs_diff(j) as u64).collect())
            .collect();
        Space {
            cells: numbered(length),
            dist,
            topology: Topology::Line,
        }
    }

    /// Cells `0..length` on a cycle.
    pub fn ring(length: usize) -> Self {
        let dist = (0..length)
            .map(|i| {
                (0..length)
                    .map(|j| {
                        let a = i.abs_diff(j);
                        a.min(length - a) as u64
                    })
                    .collect()
            })
            .collect();
        Space {
            cells: numbered(length),
            dist,
            topology: Topology::Ring,
        }
    }

    /// `width x height` grid with the L1 metric; cell `x + width * y` is named `x,y`.
    pub fn grid(width: usize, height: usize) -> Self {
        let n = width * height;
        let pos = |i: usize| (i % width.max(1), i / width.max(1));
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let ((xi, yi), (xj, yj)) = (pos(i), pos(j));
                        (xi.abs_diff(xj) + yi.abs_diff(yj)) as u64
                    })
                    .collect()
            })
            .collect();
        let cells = (0..n)
            .map(|i| {
                let (x, y) = pos(i);
                format!("{x},{y}")
            })
            .collect();
        Space {
            cells,
            dist,
            topology: Topology::Grid { width, height },
        }
    }

    /// Parse `line:N`, `ring:N` or `grid:WxH`.
    pub fn parse_sugar(s: &str) -> Result<Self, QcaError> {
        let bad = || QcaError::BadSpace(format!("unrecognized space {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "line" => Ok(Space::line(arg.parse().map_err(|_| bad())?)),
            "ring" => Ok(Space::ring(arg.parse().map_err(|_| bad())?)),
            "grid" => {
                let (w, h) = arg.split_once('x').ok_or_else(bad)?;
                Ok(Space::grid(
                    w.parse().map_err(|_| bad())?,
                    h.parse().map_err(|_| bad())?,
                ))
            }
            _ => Err(bad()),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[String] {
        &self.cells
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn dist(&self, i: usize, j: usize) -> u64 {
        self.dist[i][j]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, QcaError> {
        self.cells
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| QcaError::UnknownCell(id.to_string()))
    }

    /// Largest pairwise distance within a set of cells (0 when empty).
    pub fn diameter(&self, set: &[usize]) -> u64 {
        let mut best = 0;
        for &i in set {
            for &j in set {
                best = best.max(self.dist[i][j]);
            }
        }
        best
    }
}

#[derive(Serialize, Deserialize)]
struct Length {
    length: usize,
}

#[derive(Serialize, Deserialize)]
struct GridSize {
    width: usize,
    height: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SpaceJson {
    Line {
        line: Length,
    },
    Ring {
        ring: Length,
    },
    Grid {
        grid: GridSize,
    },
    Explicit {
        cells: Vec<String>,
        dist: Vec<Vec<u64>>,
    },
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = match self.topology {
            Topology::Line => SpaceJson::Line {
                line: Length { length: self.len() },
            },
            Topology::Ring => SpaceJson::Ring {
                ring: Length { length: self.len() },
            },
            Topology::Grid { width, height } => SpaceJson::Grid {
                grid: GridSize { width, height },
            },
            Topology::Explicit => SpaceJson::Explicit {
                cells: self.cells.clone(),
                dist: self.dist.clone(),
            },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(match SpaceJson::deserialize(de)? {
            SpaceJson::Line { line } => Space::line(line.length),
            SpaceJson::Ring { ring } => Space::ring(ring.length),
            SpaceJson::Grid { grid } => Space::grid(grid.width, grid.height),
            SpaceJson::Explicit { cells, dist } => {
                Space::new(cells, dist).map_err(serde::de::Error::custom)?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors() {
        let l = Space::line(5);
        assert_eq!(l.dist(0, 4), 4);
        let r = Space::ring(6);
        assert_eq!(r.dist(0, 5), 1);
        assert_eq!(r.dist(1, 4), 3);
        let g = Space::grid(3, 2);
        assert_eq!(g.dist(0, 5), 3);
        assert_eq!(g.cells()[4], "1,1");
        assert_eq!(Space::parse_sugar("line:8").unwrap(), Space::line(8));
        assert!(Space::parse_sugar("torus:3").is_err());
    }

    #[test]
    fn explicit_validation() {
        let cells = vec!["a".to_string(), "b".to_string()];
        assert!(Space::new(cells.clone(), vec![vec![0, 2], vec![2, 0]]).is_ok());
        assert!(Space::new(cells.clone(), vec![vec![0, 2], vec![1, 0]]).is_err());
        assert!(Space::new(cells, vec![vec![1, 2], vec![2, 0]]).is_err());
    }

    #[test]
    fn json_forms() {
        for s in [Space::line(4), Space::ring(5), Space::grid(2, 3)] {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<Space>(&text).unwrap(), s);
        }
        let explicit: Space =
            serde_json::from_str(r#"{"cells":["x","y"],"dist":[[0,3],[3,0]]}"#).unwrap();
        assert_eq!(explicit.dist(0, 1), 3);
        let line: Space = serde_json::from_str(r#"{"line":{"length":3}}"#).unwrap();
        assert_eq!(line.topology(), Topology::Line);
    }
}
