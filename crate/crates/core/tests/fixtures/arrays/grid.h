#ifndef ARRAYS_GRID_H
#define ARRAYS_GRID_H

class Grid
{
  public:
    Grid();
    double cells[4];
    void fill(const double values[4]);
    double get(const unsigned int index) const;
};

#endif
