#include "ptune/datasets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ptune {

const std::vector<std::string>& dataset_names()
{
    static const std::vector<std::string> names{"Rings", "Disks", "Outliers", "BalancedOutliers"};
    return names;
}

namespace {

struct Shape {
    enum Kind { ring, disk, square, segment } kind;
    double cx, cy;
    double size; // radius, side, or half length
};

struct Builder {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    std::vector<std::pair<double, double>> raw;
    std::vector<std::size_t> owner;

    explicit Builder(std::uint64_t seed) : rng(seed) {}

    void draw(const Shape& s, std::size_t count, std::size_t label)
    {
        for (std::size_t i = 0; i < count; ++i) {
            double x = s.cx, y = s.cy;
            switch (s.kind) {
            case Shape::ring: {
                double t = 2 * std::numbers::pi * unit(rng);
                x += s.size * std::cos(t);
                y += s.size * std::sin(t);
                break;
            }
            case Shape::disk: {
                double t = 2 * std::numbers::pi * unit(rng);
                double r = s.size * std::sqrt(unit(rng));
                x += r * std::cos(t);
                y += r * std::sin(t);
                break;
            }
            case Shape::square:
                x += s.size * (unit(rng) - 0.5);
                y += s.size * (unit(rng) - 0.5);
                break;
            case Shape::segment:
                x += s.size * (2 * unit(rng) - 1);
                break;
            }
            raw.emplace_back(x, y);
            owner.push_back(label);
        }
    }

    void outlier(double x, double y, const std::vector<Shape>& shapes)
    {
        std::size_t best = 0;
        double best_d = INFINITY;
        for (std::size_t c = 0; c < shapes.size(); ++c) {
            double d = std::hypot(x - shapes[c].cx, y - shapes[c].cy);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        raw.emplace_back(x, y);
        owner.push_back(best);
    }
};

} // namespace

ClusteringInstance generate_dataset(std::string_view name, std::uint64_t seed, std::size_t per_component)
{
    std::vector<Shape> shapes;
    std::vector<std::pair<double, double>> outliers;
    if (name == "Rings") {
        shapes = {{Shape::ring, 0, 0, 0.4}, {Shape::ring, 0, 0, 0.8}};
    } else if (name == "Disks") {
        shapes = {{Shape::disk, 1.5, 0.4, 0.4}, {Shape::disk, 1.5, -0.4, 0.4}};
    } else if (name == "Outliers") {
        shapes = {{Shape::square, 0.5, 0.5, 1.0}, {Shape::square, 1.7, 0.5, 1.0}, {Shape::segment, 1.1, 3.0, 0.5}};
        outliers = {{1.4, 2.0}, {3.5, 0.6}};
    } else if (name == "BalancedOutliers") {
        shapes = {{Shape::square, 1.1, 1.8, 1.0}, {Shape::square, 1.7, 0.5, 1.0}};
        outliers = {{0.0, 0.0}, {3.2, 0.5}};
    } else {
        throw std::invalid_argument("unknown dataset: " + std::string(name));
    }

    Builder b(seed);
    for (std::size_t c = 0; c < shapes.size(); ++c) {
        b.draw(shapes[c], per_component, c);
    }
    for (auto [x, y] : outliers) {
        b.outlier(x, y, shapes);
    }

    ClusteringInstance out;
    for (auto [x, y] : b.raw) {
        out.points.push_back({snap(x, 1'000'000), snap(y, 1'000'000)});
    }
    out.k = shapes.size();
    out.target.resize(out.k);
    for (std::size_t i = 0; i < b.owner.size(); ++i) {
        out.target[b.owner[i]].push_back(i);
    }
    out.metric_names = {"euclidean"};
    out.metrics.push_back(euclidean_table(out.points));
    return out;
}

} // namespace ptune
