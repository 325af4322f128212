from milnorcycles import Extension, FieldCtx, MilnorSymbol, norm
from milnorcycles.kgroups import norm_n1_oracle, relative_norm_n1
from milnorcycles.randgen import TOWERS


def norms_along_tower(p, text, m):
    ctx = FieldCtx(p)
    tower = Extension.parse(ctx, TOWERS[p])
    u = tower.parse_element(text, m + 1)
    direct = norm(MilnorSymbol([u], m, tower))
    middle = relative_norm_n1(u, tower, m)
    two_step = norm(MilnorSymbol([middle], m, tower.base())).fold()
    oracle = norm_n1_oracle(u, tower, m)
    return direct, middle, two_step, oracle


def show(p, text, m):
    direct, middle, two_step, oracle = norms_along_tower(p, text, m)
    print(f'F_{p}, u = {text}, m = {m}')
    print(f'  degrees visited   : {direct.reduction.schedule}')
    print(f'  one step          : {direct.fold().render()}')
    print(f'  to the middle     : {middle.render(names=("x1",))}')
    print(f'  two steps         : {two_step.render()}')
    print(f'  determinant       : {oracle.render()}')
    print(f'  witnesses         : {len(direct.witnesses)}')


if __name__ == '__main__':
    for p, text in [(3, 'x2+t'), (5, 'x2*(1+t)+x1'), (7, '1+t*x1*x2')]:
        show(p, text, 3)
