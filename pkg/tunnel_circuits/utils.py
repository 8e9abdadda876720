import math

# Θ is printed in degrees by both tables, but every service works in radians
def degrees_to_radians(value):
    return math.radians(value)


def radians_to_degrees(value):
    return math.degrees(value)


def parse_range(text):
    """Parse ``lo:hi`` or ``lo:hi:step`` into a tuple of floats (step is None when omitted)."""
    parts = [part.strip() for part in str(text).split(':')]
    if len(parts) not in (2, 3) or not all(parts):
        raise ValueError(f"range must look like lo:hi or lo:hi:step, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) == 3 else None
    if not lo < hi:
        raise ValueError(f"range must have lo < hi, got {text!r}")
    if step is not None and step <= 0:
        raise ValueError(f"range step must be positive, got {text!r}")
    return lo, hi, step


def range_grid(lo, hi, step):
    """Inclusive grid lo, lo+step, ... <= hi, built from integer multiples to avoid drift."""
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + i * step for i in range(count + 1)]
