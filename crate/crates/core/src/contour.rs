//! Zero-level-set tracing on a rectangular grid (marching squares).
//!
//! Crossings are located by bisecting the field along each cell edge
//! rather than by linear interpolation, so curved level sets are resolved
//! to the requested tolerance independent of the grid spacing.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// Edge from node (i, j) to (i + 1, j).
    AlongX(usize, usize),
    /// Edge from node (i, j) to (i, j + 1).
    AlongY(usize, usize),
}

/// Polylines of the zero level set, in grid coordinates `(x, y)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelSet {
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl LevelSet {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::Domain(format!(
            "{name} axis needs at least 2 points"
        )));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) || axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "{name} axis must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Traces the zero level set of `field(x, y)` over the grid `xs × ys`.
///
/// `tolerance` is the bisection tolerance in the edge coordinate, relative
/// to the edge length. Grid values that are exactly zero are treated as
/// positive.
pub fn trace_zero_level<F>(xs: &[f64], ys: &[f64], tolerance: f64, mut field: F) -> Result<LevelSet>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    check_axis("x", xs)?;
    check_axis("y", ys)?;
    let (nx, ny) = (xs.len(), ys.len());
    let mut values = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            values[j * nx + i] = field(xs[i], ys[j])?;
        }
    }
    trace_with_values(xs, ys, &values, tolerance, field)
}

/// As [`trace_zero_level`], with node values already evaluated
/// (row-major, `values[j * xs.len() + i] = field(xs[i], ys[j])`).
pub fn trace_with_values<F>(
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
    tolerance: f64,
    mut field: F,
) -> Result<LevelSet>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    check_axis("x", xs)?;
    check_axis("y", ys)?;
    let nx = xs.len();
    if values.len() != nx * ys.len() {
        return Err(Error::Domain("grid values do not match the axes".into()));
    }
    let value = |i: usize, j: usize| values[j * nx + i];
    let inside = |v: f64| v >= 0.0;

    let mut crossings: HashMap<EdgeKey, (f64, f64)> = HashMap::new();
    let mut crossing = |key: EdgeKey, field: &mut F| -> Result<(f64, f64)> {
        if let Some(&p) = crossings.get(&key) {
            return Ok(p);
        }
        let p = match key {
            EdgeKey::AlongX(i, j) => {
                let (a, b) = (xs[i], xs[i + 1]);
                (
                    bisect(|x| field(x, ys[j]), a, b, tolerance * (b - a))?,
                    ys[j],
                )
            }
            EdgeKey::AlongY(i, j) => {
                let (a, b) = (ys[j], ys[j + 1]);
                (
                    xs[i],
                    bisect(|y| field(xs[i], y), a, b, tolerance * (b - a))?,
                )
            }
        };
        crossings.insert(key, p);
        Ok(p)
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..nx - 1 {
            // corners counter-clockwise from (i, j)
            let c = [
                value(i, j),
                value(i + 1, j),
                value(i + 1, j + 1),
                value(i, j + 1),
            ];
            let case = c
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &v)| acc | ((inside(v) as u8) << k));
            let bottom = EdgeKey::AlongX(i, j);
            let right = EdgeKey::AlongY(i + 1, j);
            let top = EdgeKey::AlongX(i, j + 1);
            let left = EdgeKey::AlongY(i, j);
            let centre_inside = inside(0.25 * c.iter().sum::<f64>());
            let pairs: &[(EdgeKey, EdgeKey)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(left, bottom)],
                2 | 13 => &[(bottom, right)],
                3 | 12 => &[(left, right)],
                4 | 11 => &[(right, top)],
                6 | 9 => &[(bottom, top)],
                7 | 8 => &[(left, top)],
                5 if centre_inside => &[(left, top), (bottom, right)],
                5 => &[(left, bottom), (right, top)],
                10 if centre_inside => &[(left, bottom), (right, top)],
                10 => &[(left, top), (bottom, right)],
                _ => unreachable!(),
            };
            segments.extend_from_slice(pairs);
        }
    }

    // chain segments through shared edges
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<Vec<EdgeKey>> = Vec::new();

    let walk = |start_seg: usize, start_edge: EdgeKey, used: &mut Vec<bool>| {
        let mut chain = vec![start_edge];
        let mut seg = start_seg;
        let mut edge = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == edge { b } else { a };
            chain.push(next);
            edge = next;
            match by_edge[&edge].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };

    // open chains start at boundary edges (touched by one segment), in a
    // fixed order so the output is deterministic
    let mut starts: Vec<usize> = (0..segments.len()).collect();
    starts.sort_by_key(|&s| segments[s].0.sort_key().min(segments[s].1.sort_key()));
    for &s in &starts {
        if used[s] {
            continue;
        }
        let (a, b) = segments[s];
        let start = if by_edge[&a].len() == 1 {
            Some(a)
        } else if by_edge[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(edge) = start {
            chains.push(walk(s, edge, &mut used));
        }
    }
    for &s in &starts {
        if !used[s] {
            let edge = segments[s].0;
            chains.push(walk(s, edge, &mut used));
        }
    }

    let mut polylines = Vec::with_capacity(chains.len());
    for chain in chains {
        let mut line = Vec::with_capacity(chain.len());
        for key in chain {
            line.push(crossing(key, &mut field)?);
        }
        polylines.push(line);
    }
    Ok(LevelSet { polylines })
}

impl EdgeKey {
    fn sort_key(self) -> (usize, usize, u8) {
        match self {
            EdgeKey::AlongX(i, j) => (j, i, 0),
            EdgeKey::AlongY(i, j) => (j, i, 1),
        }
    }
}
