// Plant a rule in a synthetic table, mine interpolants for a few positive
// rows and check them on an independent draw.

#include <bitp/bitp.hpp>

#include <iostream>

int main()
{
    using namespace bitp;

    SynthSpec spec;
    spec.n_rows = 2000;
    spec.n_hidden = 5;
    spec.rule = {{0, Relation::ge, 0.6}, {3, Relation::le, 0.4}};
    spec.precision = 0.97;
    const SynthData train = generate(spec);
    spec.seed = 2;
    const SynthData test = generate(spec);

    MiningParams p;
    p.vocabulary = train.table->layer(train.hidden_layer);
    const Dataset d(train.table);
    const Dataset held_out(test.table);
    FractileCache cache;

    std::cout << "planted: " << describe(train.rule, *train.table) << "\n";
    std::size_t shown = 0;
    for (std::size_t row = 0; row < train.table->rows() && shown < 5; ++row) {
        if (!train.label_true.holds(*train.table, row)) continue;
        ++shown;
        const auto r = conj_interp(Premise(train.table, row, train.input_layer), train.label_true,
                                   d, p, &cache);
        const EvalResult e = evaluate(r.interpolant, train.label_true, held_out);
        std::cout << "row " << row << ": " << describe(r.interpolant, *train.table) << "\n"
                  << "  train precision " << r.train_precision.value() << ", recall "
                  << r.train_recall.value() << " (" << to_string(r.termination) << ")\n";
        if (const auto prec = e.precision())
            std::cout << "  test precision " << prec->value() << ", recall "
                      << e.recall().value_or(Ratio{0, 1}).value() << "\n";
        else
            std::cout << "  no test row satisfies it\n";
    }
}
