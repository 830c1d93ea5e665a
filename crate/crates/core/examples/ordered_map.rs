//! Single-threaded use as an ordered map.

use dcveb::DcvebArray;

fn main() -> dcveb::Result<()> {
    let map = DcvebArray::new();
    for (k, v) in [(42, "answer"), (7, "seven"), (1000, "big"), (64, "sixty-four")] {
        map.insert(k, v)?;
    }
    map.insert(7, "SEVEN")?;

    println!("get(7)         = {:?}", map.get(7));
    println!("get(8)         = {:?}", map.get(8));
    println!("successor(43)  = {:?}", map.successor(43));
    println!("predecessor(63) = {:?}", map.predecessor(63));
    println!("min / max      = {:?} / {:?}", map.minimum(), map.maximum());

    map.delete(42);
    println!("after delete(42), successor(8) = {:?}", map.successor(8));

    let mut k = 0;
    print!("in order:");
    while let Some(e) = map.successor(k) {
        print!(" {}={}", e.key, e.value);
        k = e.key + 1;
    }
    println!();
    Ok(())
}
