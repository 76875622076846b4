package main

import "fmt"

func one() int {
  return 1
}

func incr(n int) int {
  return n + one()
}

func main() {
  fmt.Printf("%d\n", incr(one()))
}
