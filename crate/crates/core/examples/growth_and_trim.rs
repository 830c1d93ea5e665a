//! Capacity grows by whole levels as large keys arrive and shrinks back when
//! they leave.

use dcveb::DcvebArray;

fn main() -> dcveb::Result<()> {
    let map = DcvebArray::with_branching(64)?;
    println!("empty:            {:?}", map.capacity_snapshot());

    map.insert(5, ())?;
    for key in [100, 1 << 20, (1 << 31) - 1] {
        map.insert(key, ())?;
        println!("insert {key:>10}: {:?}", map.capacity_snapshot());
    }
    for key in [(1 << 31) - 1, 1 << 20, 100] {
        map.delete(key);
        println!("delete {key:>10}: {:?}", map.capacity_snapshot());
    }
    println!("still there: {:?}", map.get(5));
    Ok(())
}
