#ifndef BASIC_BINOMIAL_H
#define BASIC_BINOMIAL_H

#include <exception>

/// Raised when a probability is set outside of the interval [0, 1].
struct ProbabilityError : std::exception
{
    /// A message describing the error.
    virtual const char* what() const noexcept;
};

/// A binomial distribution with a number of trials and a probability of success.
class BinomialDistribution
{
  public:
    BinomialDistribution(const unsigned int n, const double pi);
    BinomialDistribution(const BinomialDistribution& binomial);
    ~BinomialDistribution();

    /// \brief Probability mass function.
    ///
    /// \param value The number of successes.
    /// \return The probability of observing \p value successes.
    double pmf(const unsigned int value) const;

    double get_pi() const;
    void set_pi(const double pi);

    unsigned int n;

  protected:
    double _pi;
};

#endif
