fn main() {
    println!("latquant CLI placeholder");
}
