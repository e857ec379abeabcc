use crate::error::{Error, Result};
use crate::par;
use crate::sparse::DenseMatrix;

use super::FpOperator;

/// Default maximum hop count.
pub const DEFAULT_HOPS: usize = 10;

/// `blocks[p][k] = Ã_{p+1}^k X` for every order and every `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedFeatures {
    pub hops: usize,
    pub blocks: Vec<Vec<DenseMatrix>>,
}

impl PropagatedFeatures {
    pub fn orders(&self) -> usize {
        self.blocks.len()
    }

    pub fn node_count(&self) -> usize {
        self.blocks.first().map_or(0, |b| b[0].rows())
    }

    pub fn feature_dim(&self) -> usize {
        self.blocks.first().map_or(0, |b| b[0].cols())
    }
}

/// Applies each operator repeatedly to `x`; powers of `Ã_p` are never formed.
/// Orders run in parallel, hops sequentially within an order.
pub fn propagate_features(ops: &[FpOperator], x: &DenseMatrix, hops: usize) -> Result<PropagatedFeatures> {
    if let Some(op) = ops.iter().find(|op| op.node_count() != x.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "order-{} operator has {} nodes, features have {} rows",
            op.order,
            op.node_count(),
            x.rows()
        )));
    }
    let blocks = par::map_collect(ops, |op| {
        let mut chain = Vec::with_capacity(hops + 1);
        chain.push(x.clone());
        for k in 1..=hops {
            let next = op.a_tilde.spmm_dense(&chain[k - 1]).expect("shapes checked");
            chain.push(next);
        }
        chain
    });
    Ok(PropagatedFeatures { hops, blocks })
}
