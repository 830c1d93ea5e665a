//! Records short concurrent histories against a binary array and checks each
//! one against the sequential model. Also shows a rejected history.

use dcveb::harness::checker::{check_linearizable, Verdict};
use dcveb::harness::history::{record_history, History};
use dcveb::{Entry, Op, OpResult};

fn main() {
    let mut accepted = 0;
    for seed in 0..200 {
        let history = record_history(3, 4, 8, seed);
        match check_linearizable(&history).expect("well-formed history") {
            Verdict::Linearizable(_) => accepted += 1,
            Verdict::Counterexample(c) => {
                println!("seed {seed} not linearizable: {c:?}\n{}", history.dump());
            }
        }
    }
    println!("{accepted}/200 recorded histories linearizable");

    let sample = record_history(3, 4, 8, 0);
    println!("\nsample history:\n{}", sample.dump());

    // Thread 1 starts reading after thread 0's insert returned, yet sees nothing.
    let lost = History::builder()
        .call(0, Op::Insert(1, 10), OpResult::Ack)
        .call(1, Op::Get(1), OpResult::Found(None))
        .build();
    println!("lost insert: {:?}", check_linearizable(&lost).unwrap());

    let fine = History::builder()
        .invoke(0, Op::Insert(1, 10))
        .call(1, Op::Get(1), OpResult::Found(None))
        .call(1, Op::Get(1), OpResult::Found(Some(Entry::new(1, 10))))
        .respond(0, OpResult::Ack)
        .build();
    println!("overlapping read: {:?}", check_linearizable(&fine).unwrap());
}
