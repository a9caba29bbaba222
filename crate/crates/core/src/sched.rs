//! Ciphertext batching, epoch planning and workload graphs.
//!
//! Ciphertexts are grouped twice: a core streams `core_batch` of them through
//! every blind-rotation iteration (bounded by how many test vectors fit in its
//! local scratchpad), and `TvLP` cores run side by side on the same key stream.
//! One epoch therefore holds up to `device_batch = TvLP * core_batch`
//! ciphertexts; anything beyond that needs another full pass over the `n`
//! iterations.

use std::collections::VecDeque;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::archsim::ArchConfig;
use crate::error::{Error, Result};
use crate::tfhe::TfheParams;

/// Extra blind-rotation passes needed for `num_ct` ciphertexts.
pub fn fragment_count(num_ct: u64, batch_size: u64) -> Result<u64> {
    if batch_size == 0 {
        return Err(Error::InvalidParameter("batch size must be at least 1".into()));
    }
    Ok(num_ct.div_ceil(batch_size).saturating_sub(1))
}

/// Total blind-rotation time given the per-pass time.
pub fn total_time(frags: u64, br_time_per_core: f64) -> f64 {
    (frags + 1) as f64 * br_time_per_core
}

/// Bytes one test vector (a GLWE accumulator) occupies in local scratchpad.
pub fn test_vector_footprint(params: &TfheParams) -> usize {
    (params.k + 1) * params.big_n * params.modulus().bytes_per_coeff()
}

/// How many accumulators fit in a core's local scratchpad.
pub fn core_batch_capacity(params: &TfheParams, local_spm_bytes: usize) -> Result<usize> {
    let footprint = test_vector_footprint(params);
    let cap = local_spm_bytes / footprint;
    if cap == 0 {
        return Err(Error::Unsatisfiable(format!(
            "test vector needs {footprint} bytes but the local scratchpad holds {local_spm_bytes}"
        )));
    }
    Ok(cap)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub core_batch: usize,
    pub device_batch: usize,
    pub cores: usize,
    pub epochs: Vec<Range<usize>>,
}

impl BatchPlan {
    pub fn num_ct(&self) -> usize {
        self.epochs.last().map_or(0, |r| r.end)
    }

    pub fn fragments(&self) -> usize {
        self.epochs.len().saturating_sub(1)
    }

    /// Ciphertexts per core for one epoch; earlier cores take the remainder.
    pub fn core_loads(&self, epoch: usize) -> Vec<usize> {
        let size = self.epochs[epoch].len();
        let base = size / self.cores;
        let extra = size % self.cores;
        (0..self.cores).map(|c| base + usize::from(c < extra)).collect()
    }
}

/// Splits `num_ct` ciphertexts into epochs of at most one device batch.
pub fn plan_epochs(num_ct: usize, arch: &ArchConfig, params: &TfheParams) -> Result<BatchPlan> {
    let capacity = core_batch_capacity(params, arch.local_spm_bytes)?;
    let core_batch = match arch.core_batch {
        Some(0) => return Err(Error::InvalidParameter("core_batch override must be >= 1".into())),
        Some(cb) if cb > capacity => {
            return Err(Error::Unsatisfiable(format!(
                "core_batch {cb} exceeds scratchpad capacity {capacity}"
            )))
        }
        Some(cb) => cb,
        None => capacity,
    };
    if arch.tvlp == 0 {
        return Err(Error::InvalidParameter("TvLP must be >= 1".into()));
    }
    let device_batch = arch.tvlp * core_batch;
    let epochs = (0..num_ct)
        .step_by(device_batch)
        .map(|start| start..(start + device_batch).min(num_ct))
        .collect();
    Ok(BatchPlan {
        core_batch,
        device_batch,
        cores: arch.tvlp,
        epochs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// Additions and plaintext multiplications; costed at zero.
    Linear,
    /// One PBS plus keyswitch per ciphertext.
    Nonlinear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadNode {
    #[serde(default)]
    pub name: String,
    pub kind: NodeKind,
    pub count: usize,
    #[serde(default)]
    pub deps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadGraph {
    pub nodes: Vec<WorkloadNode>,
}

impl WorkloadGraph {
    pub fn new(nodes: Vec<WorkloadNode>) -> Result<Self> {
        let g = WorkloadGraph { nodes };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(&d) = node.deps.iter().find(|&&d| d >= self.nodes.len()) {
                return Err(Error::Workload(format!("node {i} depends on missing node {d}")));
            }
        }
        self.topo_order().map(|_| ())
    }

    /// Kahn's algorithm; fails on cycles.
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = self.nodes.iter().map(|x| x.deps.len()).collect();
        let mut users = vec![Vec::new(); n];
        for (i, node) in self.nodes.iter().enumerate() {
            for &d in &node.deps {
                users[d].push(i);
            }
        }
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for &u in &users[i] {
                indegree[u] -= 1;
                if indegree[u] == 0 {
                    ready.push_back(u);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Workload("dependency cycle".into()));
        }
        Ok(order)
    }

    pub fn pbs_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Nonlinear)
            .map(|n| n.count)
            .sum()
    }

    /// PBS counts grouped by dependency depth. Nodes on the same level are
    /// independent and can share epochs; levels run one after another.
    pub fn nonlinear_levels(&self) -> Result<Vec<usize>> {
        let order = self.topo_order()?;
        let mut depth = vec![0usize; self.nodes.len()];
        for &i in &order {
            let node = &self.nodes[i];
            let base = node.deps.iter().map(|&d| depth[d]).max().unwrap_or(0);
            depth[i] = base + usize::from(node.kind == NodeKind::Nonlinear);
        }
        let levels = depth.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0usize; levels];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.kind == NodeKind::Nonlinear {
                counts[depth[i] - 1] += node.count;
            }
        }
        Ok(counts)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: WorkloadGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

/// Activations after the convolution: a `[1, 2, 21, 20]` tensor.
pub const NN_CONV_OUTPUTS: usize = 2 * 21 * 20;
pub const NN_DENSE_WIDTH: usize = 92;

/// Deep-NN shape: one convolution then `depth - 1` dense layers of 92
/// neurons, each followed by an activation bootstrap.
pub fn build_nn_workload(depth: usize) -> Result<WorkloadGraph> {
    if depth == 0 {
        return Err(Error::Workload("network depth must be at least 1".into()));
    }
    let mut nodes = vec![
        WorkloadNode {
            name: "conv".into(),
            kind: NodeKind::Linear,
            count: NN_CONV_OUTPUTS,
            deps: vec![],
        },
        WorkloadNode {
            name: "conv_act".into(),
            kind: NodeKind::Nonlinear,
            count: NN_CONV_OUTPUTS,
            deps: vec![0],
        },
    ];
    for layer in 1..depth {
        let prev = nodes.len() - 1;
        nodes.push(WorkloadNode {
            name: format!("dense{layer}"),
            kind: NodeKind::Linear,
            count: NN_DENSE_WIDTH,
            deps: vec![prev],
        });
        nodes.push(WorkloadNode {
            name: format!("dense{layer}_act"),
            kind: NodeKind::Nonlinear,
            count: NN_DENSE_WIDTH,
            deps: vec![prev + 1],
        });
    }
    WorkloadGraph::new(nodes)
}

/// `len` NAND gates, each consuming the previous one's output.
pub fn build_gate_chain(len: usize) -> Result<WorkloadGraph> {
    let nodes = (0..len)
        .map(|i| WorkloadNode {
            name: format!("nand{i}"),
            kind: NodeKind::Nonlinear,
            count: 1,
            deps: if i == 0 { vec![] } else { vec![i - 1] },
        })
        .collect();
    WorkloadGraph::new(nodes)
}
