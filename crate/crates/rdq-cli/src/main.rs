fn main() {
    println!("rdq");
}
