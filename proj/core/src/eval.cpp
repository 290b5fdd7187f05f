#include "diabnet/eval.hpp"

#include "diabnet/csv_io.hpp"
#include "diabnet/errors.hpp"

#include <algorithm>

namespace diabnet {

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw ShapeError("confusion: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(labels.size()) + " labels");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int predicted = predictions[i];
        const int actual = labels[i];
        if ((predicted != 0 && predicted != 1) || (actual != 0 && actual != 1)) {
            throw LabelError("confusion expects classes in {0, 1}, found prediction " +
                             std::to_string(predicted) + " / label " + std::to_string(actual) +
                             " at row " + std::to_string(i));
        }
        if (actual == 1) {
            predicted == 1 ? ++cm.tp : ++cm.fn;
        } else {
            predicted == 0 ? ++cm.tn : ++cm.fp;
        }
    }
    return cm;
}

MetricTriple metrics(const ConfusionMatrix& cm) {
    const std::size_t total = cm.total();
    if (total == 0) {
        throw EmptyInputError("metrics over an empty confusion matrix are undefined");
    }
    MetricTriple result;
    result.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
    if (cm.tp + cm.fn > 0) {
        result.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    if (cm.tn + cm.fp > 0) {
        result.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    }
    return result;
}

std::string to_string(MetricSource source) {
    return source == MetricSource::Measured ? "measured" : "literature";
}

namespace {

std::string cell(const std::optional<double>& value) {
    return value ? format_fixed(*value, 4) : "-";
}

struct ReportRow {
    std::string model;
    MetricSource source;
    std::vector<const MetricTriple*> per_dataset; // nullptr = not evaluated
};

} // namespace

ReportDocument render_report(const std::vector<EvalEntry>& entries,
                             const std::vector<EvalEntry>& references) {
    std::vector<const EvalEntry*> all;
    all.reserve(entries.size() + references.size());
    for (const auto& e : entries) all.push_back(&e);
    for (const auto& e : references) all.push_back(&e);

    std::vector<std::string> datasets;
    for (const EvalEntry* e : all) {
        if (std::find(datasets.begin(), datasets.end(), e->dataset) == datasets.end()) {
            datasets.push_back(e->dataset);
        }
    }

    std::vector<ReportRow> rows;
    for (const EvalEntry* e : all) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& row) {
            return row.model == e->model && row.source == e->source;
        });
        if (it == rows.end()) {
            rows.push_back({e->model, e->source,
                            std::vector<const MetricTriple*>(datasets.size(), nullptr)});
            it = rows.end() - 1;
        }
        const std::size_t column =
            std::find(datasets.begin(), datasets.end(), e->dataset) - datasets.begin();
        if (it->per_dataset[column] != nullptr) {
            throw ConfigError("duplicate report cell for model '" + e->model +
                              "' on dataset '" + e->dataset + "'");
        }
        it->per_dataset[column] = &e->values;
    }

    const char* metric_names[] = {"Accuracy", "Sensitivity", "Specificity"};
    const bool prefix_dataset = datasets.size() > 1;

    std::string md = "| Model | Source |";
    std::string divider = "|---|---|";
    if (datasets.empty()) {
        for (const char* name : metric_names) {
            md += " ";
            md += name;
            md += " |";
            divider += "---|";
        }
    } else {
        for (const std::string& ds : datasets) {
            for (const char* name : metric_names) {
                md += " ";
                if (prefix_dataset) md += ds + " ";
                md += name;
                md += " |";
                divider += "---|";
            }
        }
    }
    md += "\n" + divider + "\n";

    bool any_literature = false;
    for (const ReportRow& row : rows) {
        md += "| " + row.model + " | " + to_string(row.source) + " |";
        for (const MetricTriple* triple : row.per_dataset) {
            if (triple == nullptr) {
                md += " - | - | - |";
            } else {
                md += " " + cell(triple->accuracy) + " | " + cell(triple->sensitivity) + " | " +
                      cell(triple->specificity) + " |";
            }
        }
        md += "\n";
        if (row.source == MetricSource::Literature) any_literature = true;
    }
    if (any_literature) {
        md += "\nRows marked \"literature\" are previously published results quoted for "
              "context (reported values on their authors' own splits, not reproduced by "
              "this pipeline).\n";
    }

    std::string csv = csv_line(
        {"model", "source", "dataset", "accuracy", "sensitivity", "specificity"});
    for (const ReportRow& row : rows) {
        for (std::size_t column = 0; column < row.per_dataset.size(); ++column) {
            const MetricTriple* triple = row.per_dataset[column];
            if (triple == nullptr) continue;
            csv += csv_line({row.model, to_string(row.source), datasets[column],
                             cell(triple->accuracy), cell(triple->sensitivity),
                             cell(triple->specificity)});
        }
    }

    return {md, csv};
}

} // namespace diabnet
