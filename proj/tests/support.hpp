#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef KGL_TEST_DATA
#define KGL_TEST_DATA "tests/data"
#endif

namespace testsupport {

// numeric CSV with one header line
inline std::vector<std::vector<double>> read_csv(const std::string& name)
{
    std::ifstream in(std::string(KGL_TEST_DATA) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return x;
}

inline std::vector<double> logspace(double a, double b, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = n == 1 ? a : a * std::pow(b / a, double(i) / (n - 1));
    return x;
}

}
