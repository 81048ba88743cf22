import numbers


def parse_list(value, convert=str):
    """ Parse a comma-separated config value into a list, converting each element with `convert`.

        sacred turns command line values like `n_list=61,121` into tuples and leaves others (e.g., `solvers=fm-asr,agsi`)
        as strings, so both forms are accepted.
    """

    if isinstance(value, str):
        items = [x.strip() for x in value.split(",") if x.strip()]
    elif isinstance(value, (numbers.Number)):
        items = [value]
    else:
        items = list(value)
    return [convert(x) for x in items]


def parse_floats(value, count):
    items = parse_list(value, float)
    if len(items) != count:
        raise ValueError(f"expected {count} comma-separated numbers but got {value!r}")
    return tuple(items)


def parse_pair(value):
    return parse_floats(value, 2)


def parse_odd_sizes(value):
    sizes = parse_list(value, int)
    for n in sizes:
        if n < 3 or n % 2 == 0:
            raise ValueError(f"grid sizes must be odd and at least 3 but got n={n}")
    return sizes
