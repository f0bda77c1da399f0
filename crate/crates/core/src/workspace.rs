//! Workspace sampling: grasp-pose construction over a table region,
//! accept/reject dataset generation driven by an IK solver, coverage
//! grids and the JSONL dataset format.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::{JointConfig, KinematicChain, TransformSpec};
use crate::error::{IkError, Result};
use crate::pose::{is_grasp_success, pose_error, Pose};
use crate::solve::{Budget, Solver};

/// Fixed chunk of target draws solved per dispatch round. Constant so
/// that sampling output is independent of the worker count.
const DRAW_CHUNK: usize = 32;

/// Rectangular table region the grasp objects are placed in, plus the
/// object geometry. Coordinates are in the table frame.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WorkspaceRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Table surface height in the table frame, meters.
    pub table_height: f64,
    /// Cylinder object height, meters.
    pub object_height: f64,
    /// Cylinder object radius, meters.
    pub object_radius: f64,
}

impl WorkspaceRegion {
    pub fn validate(&self) -> Result<()> {
        if self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(IkError::InvalidConfig(
                "region must have x_min < x_max and y_min < y_max".into(),
            ));
        }
        if self.table_height <= 0.0 || self.object_height <= 0.0 {
            return Err(IkError::InvalidConfig("heights must be > 0".into()));
        }
        if self.object_radius < 0.0 {
            return Err(IkError::InvalidConfig("object_radius must be >= 0".into()));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// Companion file to a chain spec: the sampling region, the fixed
/// forward-grasp orientation, the palm offset and the (approximate)
/// table-to-base mapping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneSpec {
    pub region: WorkspaceRegion,
    /// Fixed "hand forward, palm facing the object" orientation as
    /// roll/pitch/yaw radians in the table frame.
    pub grasp_rpy: [f64; 3],
    /// Distance from the palm contact point to the end-effector frame
    /// origin along -y, meters.
    pub palm_offset: f64,
    /// Pose of the table frame expressed in the chain base frame.
    pub table_to_base: TransformSpec,
}

impl SceneSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let scene: SceneSpec = serde_json::from_str(&text).map_err(|e| IkError::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        scene.region.validate()?;
        Ok(scene)
    }

    /// Grasp pose for an object standing at `(x, y)` on the table: the
    /// palm touches the cylinder at half height, offset from the object
    /// center by radius plus palm offset, with the fixed orientation.
    pub fn grasp_pose_for(&self, x: f64, y: f64) -> Result<Pose> {
        if !self.region.contains(x, y) {
            return Err(IkError::OutOfRegion { x, y });
        }
        let table_pose = Pose::from_xyz_rpy(
            [
                x,
                y - self.region.object_radius - self.palm_offset,
                self.region.table_height + 0.5 * self.region.object_height,
            ],
            self.grasp_rpy,
        );
        let to_base = self.table_to_base.to_isometry();
        Ok(Pose::from_isometry(&(to_base * table_pose.to_isometry())))
    }
}

/// One sampling attempt: a drawn target, its grasp pose, and the solve
/// outcome. Accepted rows always carry a verified solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkspaceSample {
    pub target_xy: [f64; 2],
    pub grasp_pose: Pose,
    pub solution: Option<JointConfig>,
    pub accepted: bool,
    /// Solve attempts spent on this target (bounded by the per-sample cap).
    pub attempts: u32,
}

/// Accept/reject counts over a uniform grid covering the region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageGrid {
    pub resolution: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub accepted: Vec<u32>,
    pub rejected: Vec<u32>,
}

impl CoverageGrid {
    pub fn new(region: &WorkspaceRegion, resolution: usize) -> Self {
        Self {
            resolution,
            x_min: region.x_min,
            x_max: region.x_max,
            y_min: region.y_min,
            y_max: region.y_max,
            accepted: vec![0; resolution * resolution],
            rejected: vec![0; resolution * resolution],
        }
    }

    fn cell_index(&self, x: f64, y: f64) -> usize {
        let fx = ((x - self.x_min) / (self.x_max - self.x_min)).clamp(0.0, 1.0);
        let fy = ((y - self.y_min) / (self.y_max - self.y_min)).clamp(0.0, 1.0);
        let cx = ((fx * self.resolution as f64) as usize).min(self.resolution - 1);
        let cy = ((fy * self.resolution as f64) as usize).min(self.resolution - 1);
        cy * self.resolution + cx
    }

    pub fn record(&mut self, sample: &WorkspaceSample) {
        let idx = self.cell_index(sample.target_xy[0], sample.target_xy[1]);
        if sample.accepted {
            self.accepted[idx] += 1;
        } else {
            self.rejected[idx] += 1;
        }
    }

    pub fn total_accepted(&self) -> u64 {
        self.accepted.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn total_rejected(&self) -> u64 {
        self.rejected.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn total_attempts(&self) -> u64 {
        self.total_accepted() + self.total_rejected()
    }
}

/// Knobs for [`sample_workspace`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingOptions {
    /// Solve attempts per drawn target before it is rejected; the
    /// default 1 is one-shot accept/reject with a fresh position after
    /// every rejection.
    pub attempt_cap: u32,
    /// Hard ceiling on drawn targets, preventing non-termination on
    /// unreachable regions.
    pub attempt_ceiling: usize,
    pub grid_resolution: usize,
    /// Samples solved concurrently. Output is worker-count independent.
    pub workers: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            attempt_cap: 1,
            attempt_ceiling: 100_000,
            grid_resolution: 50,
            workers: 1,
        }
    }
}

/// Result of a sampling run: every attempt row (accepted and rejected,
/// in draw order) plus the coverage grid over all of them.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub samples: Vec<WorkspaceSample>,
    pub grid: CoverageGrid,
}

impl SampleSet {
    pub fn accepted(&self) -> impl Iterator<Item = &WorkspaceSample> {
        self.samples.iter().filter(|s| s.accepted)
    }

    pub fn accepted_count(&self) -> usize {
        self.samples.iter().filter(|s| s.accepted).count()
    }
}

fn attempt_seed(base: u64, attempt: u64, retry: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(attempt.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(retry)
}

/// Draw uniform targets, build grasp poses and keep the ones the solver
/// cracks, until `n` acceptances or the attempt ceiling.
///
/// Rejected draws are kept in the output too — the dataset records both
/// and the coverage grid counts every attempt.
pub fn sample_workspace(
    chain: &KinematicChain,
    scene: &SceneSpec,
    n: usize,
    solver: &dyn Solver,
    budget_per_sample: &Budget,
    rng_seed: u64,
    opts: &SamplingOptions,
) -> Result<SampleSet> {
    if n == 0 {
        return Err(IkError::InvalidConfig("need n >= 1 samples".into()));
    }
    scene.region.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut grid = CoverageGrid::new(&scene.region, opts.grid_resolution);
    let mut samples: Vec<WorkspaceSample> = Vec::new();
    let mut accepted = 0usize;
    let seed_config = chain.mid_config();

    'outer: while accepted < n && samples.len() < opts.attempt_ceiling {
        let chunk = DRAW_CHUNK
            .min(opts.attempt_ceiling - samples.len());
        let draws: Vec<(u64, f64, f64)> = (0..chunk)
            .map(|k| {
                let x = rng.gen_range(scene.region.x_min..=scene.region.x_max);
                let y = rng.gen_range(scene.region.y_min..=scene.region.y_max);
                ((samples.len() + k) as u64, x, y)
            })
            .collect();

        let chunk_samples =
            solve_chunk(chain, scene, solver, budget_per_sample, rng_seed, &seed_config, &draws, opts)?;

        for sample in chunk_samples {
            grid.record(&sample);
            if sample.accepted {
                accepted += 1;
            }
            samples.push(sample);
            if accepted >= n {
                break 'outer;
            }
        }
    }

    if accepted == 0 {
        return Err(IkError::RegionUnreachable {
            attempts: samples.len(),
        });
    }
    Ok(SampleSet { samples, grid })
}

#[allow(clippy::too_many_arguments)]
fn solve_chunk(
    chain: &KinematicChain,
    scene: &SceneSpec,
    solver: &dyn Solver,
    budget: &Budget,
    rng_seed: u64,
    seed_config: &JointConfig,
    draws: &[(u64, f64, f64)],
    opts: &SamplingOptions,
) -> Result<Vec<WorkspaceSample>> {
    let solve_one = |&(attempt_idx, x, y): &(u64, f64, f64)| -> Result<WorkspaceSample> {
        let grasp_pose = scene.grasp_pose_for(x, y)?;
        let mut attempts = 0u32;
        let mut solution = None;
        while attempts < opts.attempt_cap {
            let seed = attempt_seed(rng_seed, attempt_idx, u64::from(attempts));
            attempts += 1;
            let result = solver.solve(chain, &grasp_pose, seed_config, seed, budget)?;
            if result.success {
                solution = Some(result.solution);
                break;
            }
        }
        Ok(WorkspaceSample {
            target_xy: [x, y],
            grasp_pose,
            accepted: solution.is_some(),
            solution,
            attempts,
        })
    };

    if opts.workers <= 1 || draws.len() <= 1 {
        return draws.iter().map(solve_one).collect();
    }

    // Worker pool over a shared index; results land in draw order.
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<WorkspaceSample>>> = Vec::new();
    slots.resize_with(draws.len(), || None);
    let slots = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.min(draws.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= draws.len() {
                    break;
                }
                let outcome = solve_one(&draws[i]);
                slots.lock().expect("no poisoned worker")[i] = Some(outcome);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .iter_mut()
        .map(|slot| slot.take().expect("every slot filled"))
        .collect()
}

// ---------------------------------------------------------------------------
// Dataset persistence (JSONL)
// ---------------------------------------------------------------------------

/// First line of a dataset file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub kind: String,
    pub chain: String,
    pub region: WorkspaceRegion,
    pub rng_seed: u64,
    pub solver: String,
    pub solver_config_digest: String,
    pub deterministic: bool,
}

/// Canonical byte serialization of a dataset: header line plus one
/// sample per line. The dataset digest is the SHA-256 of these bytes.
pub fn dataset_bytes(header: &DatasetHeader, samples: &[WorkspaceSample]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(serde_json::to_string(header).expect("header serializes").as_bytes());
    out.push(b'\n');
    for sample in samples {
        out.extend_from_slice(
            serde_json::to_string(sample).expect("sample serializes").as_bytes(),
        );
        out.push(b'\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

pub fn save_dataset(
    path: impl AsRef<Path>,
    header: &DatasetHeader,
    samples: &[WorkspaceSample],
) -> Result<String> {
    let bytes = dataset_bytes(header, samples);
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&bytes)?;
    file.flush()?;
    Ok(sha256_hex(&bytes))
}

/// Load a dataset and re-verify every accepted row by recomputing FK
/// against the stored grasp pose; corrupted rows are rejected.
pub fn load_dataset(
    path: impl AsRef<Path>,
    chain: &KinematicChain,
) -> Result<(DatasetHeader, Vec<WorkspaceSample>, String)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let digest = sha256_hex(&bytes);
    let mut lines = bytes.lines();
    let header_line = lines.next().transpose()?.ok_or_else(|| IkError::CorruptDataset {
        path: path.display().to_string(),
        detail: "empty file".into(),
    })?;
    let header: DatasetHeader =
        serde_json::from_str(&header_line).map_err(|e| IkError::CorruptDataset {
            path: path.display().to_string(),
            detail: format!("bad header: {e}"),
        })?;
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: WorkspaceSample =
            serde_json::from_str(&line).map_err(|e| IkError::CorruptDataset {
                path: path.display().to_string(),
                detail: format!("line {}: {e}", lineno + 2),
            })?;
        if sample.accepted {
            let solution = sample.solution.as_ref().ok_or_else(|| IkError::CorruptDataset {
                path: path.display().to_string(),
                detail: format!("line {}: accepted row without solution", lineno + 2),
            })?;
            let pose = chain.forward_kinematics(solution)?;
            let err = pose_error(&pose, &sample.grasp_pose);
            if !is_grasp_success(&err) {
                return Err(IkError::CorruptDataset {
                    path: path.display().to_string(),
                    detail: format!(
                        "line {}: stored solution fails re-verification ({:.4} m, {:.2} deg)",
                        lineno + 2,
                        err.position_error,
                        err.orientation_error_sum
                    ),
                });
            }
        }
        samples.push(sample);
    }
    Ok((header, samples, digest))
}

// ---------------------------------------------------------------------------
// Coverage map emission
// ---------------------------------------------------------------------------

/// Write `<stem>.pgm` (P2 ASCII acceptance ratio) and `<stem>.csv`
/// (raw per-cell counts). Returns the two paths.
pub fn emit_coverage_map(
    grid: &CoverageGrid,
    stem: impl AsRef<Path>,
) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let stem = stem.as_ref();
    if grid.resolution == 0 {
        return Err(IkError::InvalidConfig("empty coverage grid".into()));
    }
    let pgm_path = stem.with_extension("pgm");
    let csv_path = stem.with_extension("csv");
    let res = grid.resolution;

    let mut pgm = String::new();
    pgm.push_str("P2\n");
    pgm.push_str(&format!(
        "# acceptance ratio over [{:.3},{:.3}]x[{:.3},{:.3}]\n",
        grid.x_min, grid.x_max, grid.y_min, grid.y_max
    ));
    pgm.push_str(&format!("{res} {res}\n255\n"));
    // Top PGM row = maximum y, so the image reads like a floor plan.
    for cy in (0..res).rev() {
        let mut row = Vec::with_capacity(res);
        for cx in 0..res {
            let idx = cy * res + cx;
            let total = grid.accepted[idx] + grid.rejected[idx];
            let intensity = if total == 0 {
                0
            } else {
                ((255.0 * f64::from(grid.accepted[idx]) / f64::from(total)).round()) as u32
            };
            row.push(intensity.to_string());
        }
        pgm.push_str(&row.join(" "));
        pgm.push('\n');
    }
    std::fs::write(&pgm_path, pgm)?;

    let mut csv = String::from("cell_x,cell_y,x_center,y_center,accepted,rejected\n");
    let dx = (grid.x_max - grid.x_min) / res as f64;
    let dy = (grid.y_max - grid.y_min) / res as f64;
    for cy in 0..res {
        for cx in 0..res {
            let idx = cy * res + cx;
            csv.push_str(&format!(
                "{},{},{:.4},{:.4},{},{}\n",
                cx,
                cy,
                grid.x_min + (cx as f64 + 0.5) * dx,
                grid.y_min + (cy as f64 + 0.5) * dy,
                grid.accepted[idx],
                grid.rejected[idx]
            ));
        }
    }
    std::fs::write(&csv_path, csv)?;
    Ok((pgm_path, csv_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_region() -> WorkspaceRegion {
        WorkspaceRegion {
            x_min: 0.0,
            x_max: 1.0,
            y_min: -1.0,
            y_max: 0.0,
            table_height: 0.74,
            object_height: 0.20,
            object_radius: 0.03,
        }
    }

    fn test_scene() -> SceneSpec {
        SceneSpec {
            region: test_region(),
            grasp_rpy: [0.0, 0.0, 0.0],
            palm_offset: 0.0,
            table_to_base: TransformSpec {
                xyz: [0.0, 0.0, 0.0],
                rpy: [0.0, 0.0, 0.0],
            },
        }
    }

    #[test]
    fn grasp_pose_height_is_table_plus_half_object() {
        let scene = test_scene();
        let pose = scene.grasp_pose_for(0.5, -0.5).unwrap();
        assert_relative_eq!(pose.position.z, 0.84, epsilon = 1e-12);
        assert_relative_eq!(pose.position.x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(pose.position.y, -0.53, epsilon = 1e-12);
    }

    #[test]
    fn grasp_pose_translation_equivariance_in_x() {
        let scene = test_scene();
        let a = scene.grasp_pose_for(0.3, -0.4).unwrap();
        let b = scene.grasp_pose_for(0.7, -0.4).unwrap();
        assert_relative_eq!(b.position.x - a.position.x, 0.4, epsilon = 1e-12);
        assert_eq!(a.position.y, b.position.y);
        assert_eq!(a.position.z, b.position.z);
        assert_eq!(a.orientation, b.orientation);
    }

    #[test]
    fn grasp_pose_orientation_is_constant() {
        let scene = SceneSpec {
            grasp_rpy: [0.1, -0.2, 1.5],
            ..test_scene()
        };
        let expected = Pose::from_xyz_rpy([0.0; 3], [0.1, -0.2, 1.5]).orientation;
        for (x, y) in [(0.1, -0.9), (0.5, -0.5), (0.99, -0.01)] {
            let pose = scene.grasp_pose_for(x, y).unwrap();
            assert_relative_eq!(
                (pose.orientation.inverse() * expected).angle(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn out_of_region_rejected() {
        let scene = test_scene();
        assert!(matches!(
            scene.grasp_pose_for(1.5, -0.5),
            Err(IkError::OutOfRegion { .. })
        ));
    }

    #[test]
    fn coverage_grid_counts_sum_to_attempts() {
        let region = test_region();
        let mut grid = CoverageGrid::new(&region, 10);
        let scene = test_scene();
        for i in 0..57 {
            let x = 0.01 + 0.017 * i as f64;
            let y = -0.99 + 0.017 * i as f64;
            let sample = WorkspaceSample {
                target_xy: [x, y],
                grasp_pose: scene.grasp_pose_for(x, y).unwrap(),
                solution: None,
                accepted: i % 3 == 0,
                attempts: 1,
            };
            grid.record(&sample);
        }
        assert_eq!(grid.total_attempts(), 57);
        assert_eq!(grid.total_accepted(), 19);
    }

    #[test]
    fn coverage_map_files_have_expected_shape() {
        let region = test_region();
        let mut grid = CoverageGrid::new(&region, 4);
        grid.accepted[0] = 5; // all-accepted cell
        grid.rejected[5] = 3; // all-rejected cell
        let dir = tempfile::tempdir().unwrap();
        let (pgm, csv) = emit_coverage_map(&grid, dir.path().join("cov")).unwrap();
        let pgm_text = std::fs::read_to_string(pgm).unwrap();
        let lines: Vec<&str> = pgm_text.lines().collect();
        assert_eq!(lines[0], "P2");
        assert_eq!(lines[2], "4 4");
        // cell 0 is bottom-left: last pixel row, first column
        let bottom_row: Vec<&str> = lines[7].split_whitespace().collect();
        assert_eq!(bottom_row[0], "255");
        let csv_text = std::fs::read_to_string(csv).unwrap();
        assert_eq!(csv_text.lines().count(), 1 + 16);
        assert!(csv_text.lines().nth(1).unwrap().ends_with("5,0"));
    }

    #[test]
    fn all_accepted_grid_saturates_pgm() {
        let region = test_region();
        let mut grid = CoverageGrid::new(&region, 2);
        for c in &mut grid.accepted {
            *c = 7;
        }
        let dir = tempfile::tempdir().unwrap();
        let (pgm, _) = emit_coverage_map(&grid, dir.path().join("full")).unwrap();
        let text = std::fs::read_to_string(pgm).unwrap();
        for line in text.lines().skip(4) {
            for v in line.split_whitespace() {
                assert_eq!(v, "255");
            }
        }
    }
}
