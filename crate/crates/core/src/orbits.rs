//! Orbit-tree expansion, forward limit set extraction, and rasterization.
//!
//! Exact mode enumerates every branch composition: level n holds exactly
//! d_w^n nodes in a complete tree, children stored contiguously in branch
//! order, so sums over levels are reproducible bit for bit. Dedup mode
//! merges nodes on a spherical grid and is only good for pictures.

use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::numeric::ordered_map;
use crate::sphere::{PointCloud, SphereGrid, SpherePoint};

/// One node of the orbit tree.
#[derive(Clone, Copy, Debug)]
pub struct LevelNode {
    pub point: SpherePoint,
    /// ln of the accumulated spherical derivative product along the path;
    /// log domain because depth-40 products underflow doubles.
    pub log_weight: f64,
    pub parent: u32,
}

impl LevelNode {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// All nodes of one depth.
#[derive(Clone, Debug)]
pub struct LevelNodes {
    pub depth: usize,
    pub nodes: Vec<LevelNode>,
    /// Exact-mode levels may be summed; dedup levels may not.
    pub summable: bool,
}

#[derive(Clone, Copy, Debug)]
pub enum ExpandMode {
    /// Full enumeration, erroring when d_w^depth exceeds the node budget.
    Exact { budget: f64 },
    /// Merge nodes within `grid_res`, keeping the largest weight.
    Dedup { grid_res: f64 },
}

impl ExpandMode {
    pub fn exact() -> Self {
        ExpandMode::Exact { budget: 2e7 }
    }
}

/// Expand the orbit tree of `x` under `c` down to `depth`, materializing
/// every level.
pub fn expand(
    c: &Correspondence,
    x: &SpherePoint,
    depth: usize,
    mode: ExpandMode,
) -> Result<Vec<LevelNodes>> {
    let mut out = Vec::with_capacity(depth + 1);
    expand_visit(c, x, depth, mode, |level| {
        out.push(level.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Streaming expansion: `visit` sees each level once, in order. Only the
/// current level stays in memory.
pub fn expand_visit(
    c: &Correspondence,
    x: &SpherePoint,
    depth: usize,
    mode: ExpandMode,
    mut visit: impl FnMut(&LevelNodes) -> Result<()>,
) -> Result<()> {
    let dw = c.degree_w() as f64;
    if let ExpandMode::Exact { budget } = mode {
        let needed = dw.powi(depth as i32);
        if needed > budget {
            return Err(Error::NodeBudget { needed, budget });
        }
    }
    let mut current = LevelNodes {
        depth: 0,
        nodes: vec![LevelNode {
            point: *x,
            log_weight: 0.0,
            parent: 0,
        }],
        summable: true,
    };
    visit(&current)?;
    for level in 1..=depth {
        let children: Vec<Result<Vec<(SpherePoint, f64)>>> = ordered_map(&current.nodes, |node| {
            let images = c.forward(&node.point)?;
            let mut out = Vec::with_capacity(images.len());
            for w in images {
                let d = c.germ_deriv(&node.point, &w)?;
                out.push((w, node.log_weight + d.ln()));
            }
            Ok(out)
        });
        let next = match mode {
            ExpandMode::Exact { .. } => {
                let mut nodes = Vec::with_capacity(current.nodes.len() * c.degree_w());
                for (parent, group) in children.into_iter().enumerate() {
                    for (point, log_weight) in group? {
                        nodes.push(LevelNode {
                            point,
                            log_weight,
                            parent: parent as u32,
                        });
                    }
                }
                LevelNodes {
                    depth: level,
                    nodes,
                    summable: true,
                }
            }
            ExpandMode::Dedup { grid_res } => {
                let mut grid = SphereGrid::new(grid_res.max(1e-300));
                let mut nodes: Vec<LevelNode> = Vec::new();
                for (parent, group) in children.into_iter().enumerate() {
                    for (point, log_weight) in group? {
                        match grid.nearest_within(&point, grid_res) {
                            Some((idx, _)) => {
                                // keep the max-weight node of the cluster
                                let slot = &mut nodes[idx as usize];
                                if log_weight > slot.log_weight {
                                    slot.point = point;
                                    slot.log_weight = log_weight;
                                    slot.parent = parent as u32;
                                }
                            }
                            None => {
                                grid.push(point);
                                nodes.push(LevelNode {
                                    point,
                                    log_weight,
                                    parent: parent as u32,
                                });
                            }
                        }
                    }
                }
                LevelNodes {
                    depth: level,
                    nodes,
                    summable: false,
                }
            }
        };
        current = next;
        visit(&current)?;
    }
    Ok(())
}

/// Approximate the forward limit set: dedup union of levels
/// `burn_in..=depth`. The transient early orbit pollutes the attractor,
/// hence the burn-in (default depth/3 at the CLI).
pub fn limit_set(
    c: &Correspondence,
    x: &SpherePoint,
    depth: usize,
    burn_in: usize,
    grid_res: f64,
) -> Result<PointCloud> {
    if burn_in >= depth {
        return Err(Error::invalid(
            "limit_set",
            format!("burn_in {burn_in} must be smaller than depth {depth}"),
        ));
    }
    let mut grid = SphereGrid::new(grid_res.max(1e-300));
    expand_visit(c, x, depth, ExpandMode::Dedup { grid_res }, |level| {
        if level.depth >= burn_in {
            for node in &level.nodes {
                grid.insert_if_far(node.point, grid_res / 2.0);
            }
        }
        Ok(())
    })?;
    Ok(PointCloud {
        points: grid.into_points(),
        grid_res,
    })
}

/// Rectangle in the finite chart.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(center_re: f64, center_im: f64, half: f64) -> Self {
        Window {
            re_min: center_re - half,
            re_max: center_re + half,
            im_min: center_im - half,
            im_max: center_im + half,
        }
    }
}

/// Grayscale raster, row-major from the top-left.
#[derive(Clone, Debug)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

/// Binary hit raster of the cloud over `window`. Points at infinity and
/// points outside the window are skipped.
pub fn render(cloud: &PointCloud, window: &Window, width: u32, height: u32) -> Result<Raster> {
    if window.re_max <= window.re_min || window.im_max <= window.im_min || width == 0 || height == 0
    {
        return Err(Error::invalid("render", "window or resolution degenerate"));
    }
    let mut pixels = vec![0u8; width as usize * height as usize];
    let w_span = window.re_max - window.re_min;
    let h_span = window.im_max - window.im_min;
    for p in &cloud.points {
        let Some(z) = p.to_complex() else { continue };
        if z.re < window.re_min
            || z.re > window.re_max
            || z.im < window.im_min
            || z.im > window.im_max
        {
            continue;
        }
        let px = (((z.re - window.re_min) / w_span) * width as f64) as usize;
        let py = (((window.im_max - z.im) / h_span) * height as f64) as usize;
        let px = px.min(width as usize - 1);
        let py = py.min(height as usize - 1);
        pixels[py * width as usize + px] = 255;
    }
    Ok(Raster {
        width,
        height,
        pixels,
    })
}
