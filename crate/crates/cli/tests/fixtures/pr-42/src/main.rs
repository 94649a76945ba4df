fn main() {
    // Copyright 2024 the project authors.
}
