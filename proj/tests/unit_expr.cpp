#include <catch_amalgamated.hpp>

#include "skewmix/expr.hpp"

using namespace skewmix;

TEST_CASE("parser handles precedence and associativity") {
    CHECK(eval_value(*parse_expression("1 + 2*3"), 0.0) == 7.0);
    CHECK(eval_value(*parse_expression("2^3^2"), 0.0) == 512.0);  // right-assoc
    CHECK(eval_value(*parse_expression("-2^2"), 0.0) == -4.0);    // unary binds loosest
    CHECK(eval_value(*parse_expression("(0-2)^3"), 0.0) == -8.0);
    CHECK(eval_value(*parse_expression("6/3/2"), 0.0) == 1.0);
    CHECK(eval_value(*parse_expression("1 - 2 - 3"), 0.0) == -4.0);
    CHECK(eval_value(*parse_expression("pi"), 0.0) == Catch::Approx(kPi));
    CHECK(eval_value(*parse_expression("1.5e-3"), 0.0) == Catch::Approx(1.5e-3));
    CHECK(eval_value(*parse_expression("3*x"), 0.25) == Catch::Approx(0.75));
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(parse_expression("2*(x"), ParseError);
    CHECK_THROWS_AS(parse_expression("foo(x)"), ParseError);
    CHECK_THROWS_AS(parse_expression(""), ParseError);
    CHECK_THROWS_AS(parse_expression("1 + "), ParseError);
    try {
        parse_expression("2*)x");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 2);
    }
}

TEST_CASE("print/parse round trip preserves structure") {
    for (const char* src : {"3*x", "cos(2*pi*x)", "x^2 - sin(x)/(2 + cos(x))",
                            "-(x + 1)^3", "exp(-x^2)", "2^3^x", "1 - (2 - x)",
                            "0.1*sin(6*pi*x) - 0.1*sin(2*pi*x) + 0.7071067811865476"}) {
        ExprPtr e = parse_expression(src);
        std::string printed = to_string(*e);
        ExprPtr again = parse_expression(printed);
        INFO(src << " -> " << printed);
        CHECK(expr_equal(*e, *again));
        for (double x : {0.1, 0.37, 0.9})
            CHECK(eval_value(*e, x) == Catch::Approx(eval_value(*again, x)).margin(1e-15));
    }
}

TEST_CASE("jets agree with central finite differences") {
    const char* exprs[] = {
        "3*x + 0.05*sin(6*pi*x)", "cos(2*pi*x)", "exp(sin(x))", "x^3 - 2*x",
        "sin(x)*cos(2*x)",        "1/(2 + sin(x))", "log(2 + cos(x))",
        "x^2*exp(-x)",            "sin(x^2)",       "(1 + x)^4",
    };
    Rng rng(7);
    int cases = 0;
    for (const char* src : exprs) {
        ExprPtr e = parse_expression(src);
        for (int k = 0; k < 10; ++k) {
            double x = rng.uniform(0.05, 0.95);
            Jet2 j = eval_jet2(*e, x);
            double h = 1e-5;
            double fp = (eval_value(*e, x + h) - eval_value(*e, x - h)) / (2.0 * h);
            double fpp =
                (eval_value(*e, x + h) - 2.0 * j.v + eval_value(*e, x - h)) / (h * h);
            INFO(src << " at x = " << x);
            CHECK(j.d1 == Catch::Approx(fp).margin(1e-5 * (1.0 + std::fabs(fp))));
            CHECK(j.d2 == Catch::Approx(fpp).margin(1e-3 * (1.0 + std::fabs(fpp))));
            cases += 1;
        }
    }
    CHECK(cases == 100);
}

TEST_CASE("domain errors surface during evaluation") {
    CHECK_THROWS_AS(eval_value(*parse_expression("log(x - 1)"), 0.5), EvalDomainError);
    CHECK_THROWS_AS(eval_value(*parse_expression("1/(x - x)"), 0.5), EvalDomainError);
}
