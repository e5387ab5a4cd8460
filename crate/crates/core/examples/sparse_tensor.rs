//! Building a labeled sparse tensor by hand, then saving and reloading it.
//!
//!     cargo run --example sparse_tensor

use tensor_topics::sparse_tensor::io::LabeledTensor;
use tensor_topics::sparse_tensor::{AxisMap, SparseTensor};

fn main() -> tensor_topics::Result<()> {
    let shape = [2, 3, 2];
    // Duplicate coordinates are summed; explicit zeros are dropped.
    let entries = vec![
        ([0, 0, 0], 1.0),
        ([1, 2, 1], 0.5),
        ([0, 0, 0], 2.0),
        ([1, 1, 0], 0.0),
        ([0, 2, 1], 4.0),
    ];
    let t = SparseTensor::from_entries(entries, &shape)?;
    println!("shape {:?}, nnz {}, density {:.3}", t.shape(), t.nnz(), t.density());
    for (coord, v) in t.iter() {
        println!("  {coord:?} = {v}");
    }
    println!("‖X‖_F = {:.4}", t.frobenius_norm());

    match SparseTensor::from_entries(vec![([0, 3, 0], 1.0)], &shape) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let labeled = LabeledTensor::new(
        t,
        vec!["author".into(), "word".into(), "journal".into()],
        vec![
            AxisMap::from_labels(["kim", "ortiz"])?,
            AxisMap::from_labels(["virus", "vaccine", "mask"])?,
            AxisMap::from_labels(["nature", "vaccine"])?,
        ],
    )?;
    let dir = std::env::temp_dir().join("tensor-topics-example");
    labeled.write_dir(&dir)?;
    let back = LabeledTensor::read_dir(&dir)?;
    assert_eq!(back.tensor, labeled.tensor);
    println!("round-tripped through {}", dir.display());
    Ok(())
}
