"""Linear algebra, IIPS operations, reverse-order-law analysis and the hunter."""
